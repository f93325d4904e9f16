#!/usr/bin/env python3
"""
Setup script for the trace-convexity package
"""

from setuptools import setup, find_packages
from pathlib import Path
import re

# Read the README file
this_directory = Path(__file__).parent
long_description = (
    (this_directory / "readme.md").read_text(encoding="utf-8")
    if (this_directory / "readme.md").exists()
    else ""
)
init_file = this_directory / "trace_convexity" / "__init__.py"


def read_dunder(name, default=None):
    """Read __name__ = "..." from the package without importing it"""
    with open(init_file, "r", encoding="utf-8") as f:
        content = f.read()
    match = re.search(rf'^__{name}__ = ["\']([^"\']*)["\']', content, re.M)
    if match:
        return match.group(1)
    if default is None:
        raise RuntimeError(f"Unable to find __{name}__ string.")
    return default


setup(
    name="trace-convexity",
    version=read_dunder("version"),
    author=read_dunder("author", "trace-convexity contributors"),
    author_email=read_dunder("email", ""),
    description=read_dunder(
        "description",
        "Numerical tests of joint convexity and concavity of matrix trace functionals",
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.20",
        "scipy>=1.7",
    ],
    extras_require={
        "dev": [
            "pytest>=6.0",
            "pytest-cov",
            "black",
            "flake8",
            "mypy",
        ],
    },
    entry_points={
        "console_scripts": [
            "trace-convexity=trace_convexity.cli:main",
        ],
    },
)
