# pylint: skip-file
# dipoletree/utilities/__init__.py
