#!/usr/bin/env python3
"""
Setup script for nhqsim.
"""
from pathlib import Path

from setuptools import find_packages, setup

# Read README for long description
readme_path = Path(__file__).parent / "README.md"
long_description = (
    readme_path.read_text(encoding="utf-8") if readme_path.exists() else ""
)

# Read requirements
requirements_path = Path(__file__).parent / "requirements.txt"
requirements = []
if requirements_path.exists():
    # requirements.txt is a pip-compile lockfile for Python 3.12; keep the
    # package set but drop the exact pins so other supported Pythons resolve.
    requirements = [
        line.split("#")[0].strip().split("==")[0]
        for line in requirements_path.read_text().splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]

setup(
    name="nhqsim",
    version="1.0.0",
    description="Exceptional points, non-unitary dynamics and multipartite entanglement of non-Hermitian qubits",
    long_description=long_description,
    long_description_content_type="text/markdown",
    author="nhqsim developers",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    py_modules=["nhqsim"],
    install_requires=requirements,
    extras_require={
        "dev": ["pytest>=7.0.0", "pytest-cov>=4.0.0", "black>=22.0.0", "flake8>=5.0.0", "isort>=5.0.0",
                "mypy>=1.0.0"],
    },
    entry_points={
        "console_scripts": [
            "nhqsim=nhqsim:main",
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    python_requires=">=3.10",
    keywords="non-hermitian, exceptional points, qubits, entanglement, ghz, three-tangle",
)
