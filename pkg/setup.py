"""
Filename: setup.py

Description: Local development / editable install for DipoleTree
"""

from setuptools import setup, find_packages

setup(
    name="DipoleTree",
    version="0.1.0",
    description="Survival trees with kernel dipole splits for censored data",
    author="DipoleTree developers",
    packages=find_packages(where="src", include=["dipoletree", "dipoletree.*"]),
    package_dir={"": "src"},
    package_data={"dipoletree": ["py.typed"]},
    include_package_data=True,
    install_requires=["numpy", "scipy", "pandas", "joblib"],
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "dipoletree = dipoletree.configuration.cli:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering",
    ],
)
