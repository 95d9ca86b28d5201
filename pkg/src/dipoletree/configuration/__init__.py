# pylint: skip-file
# dipoletree/configuration/__init__.py
