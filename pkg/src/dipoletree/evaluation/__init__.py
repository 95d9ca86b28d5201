# pylint: skip-file
# dipoletree/evaluation/__init__.py
