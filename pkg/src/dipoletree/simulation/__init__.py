# pylint: skip-file
# dipoletree/simulation/__init__.py
