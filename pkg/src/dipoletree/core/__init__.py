# pylint: skip-file
# dipoletree/core/__init__.py
