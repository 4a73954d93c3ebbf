import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="fpa-learning",
    version="0.1.0",
    author="fpa-learning developers",
    description="Mean-based learners in repeated first-price auctions",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["examples", "examples.*"]),
    python_requires=">=3.11",
    install_requires=["django>=5.1", "graphene>=3.3", "numpy>=1.26", "matplotlib>=3.8"],
    entry_points={"console_scripts": ["fpa=fpa_learning.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
)
