"""
Setup script for whmf
"""
from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="whmf",
    version="0.1.0",
    author="",
    description="弱全纯模形式的典范基、p 级表格与整除性证书",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("examples", "examples.*", "fixtures")),
    package_data={"whmf": ["data/*.yaml"]},
    entry_points={"console_scripts": ["whmf=whmf.cli:main"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
    python_requires=">=3.9",
    install_requires=requirements,
)
