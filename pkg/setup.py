from setuptools import setup, find_packages

setup(
    name="lattice-dk",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "click>=8.1.3",
        "pyyaml>=6.0",
        "python-dotenv>=1.0.0",
        "numpy>=1.24",
    ],
    extras_require={
        "test": ["pytest>=7.3.1", "hypothesis>=6.75"],
    },
    entry_points={
        "console_scripts": [
            "lattice-dk=lattice_dk.cli:main",
        ],
    },
    python_requires=">=3.9",
)
