from setuptools import find_packages, setup

with open("README.md", encoding="utf-8") as f:
    long_desc = f.read()

setup(
    name="ebayes-lab",
    version="0.1.0",
    description="Empirical Bayes hyperparameter selection and contraction experiments.",
    long_description=long_desc,
    long_description_content_type="text/markdown",
    python_requires=">=3.10",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    install_requires=[
        "numpy>=1.26",
        "scipy>=1.11",
        "joblib>=1.3",
    ],
    extras_require={"dev": ["pytest"]},
    entry_points={"console_scripts": ["ebayes-lab=ebayes.harness.cli:main"]},
)
