# pylint: skip-file
# dipoletree/tree/__init__.py
