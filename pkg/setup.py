#!/usr/bin/env python
from setuptools import setup, find_packages
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the relevant file
with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

# Get the version from the package
with open(path.join(here, 'src', 'latentadversary', 'VERSION'), encoding='utf-8') as f:
    version = f.read().strip()

setup(
    name='latentadversary',
    version=version,
    packages=find_packages("src"),
    package_dir={"" : "src"},
    package_data={"latentadversary" : ["VERSION", "schemas/*.json"]},
    include_package_data=True,
    description='Generative adversarial training with latent attacks, at desk scale',
    long_description=long_description,
    install_requires=['numpy', 'tqdm', 'jsonschema'],
    extras_require={
        'test' : ['pytest'],
        'docs' : ['sphinx'],
    },
    entry_points={
        'console_scripts' : ['gat=latentadversary.cli:main'],
    },
    author="The Latent Adversary developers",
    license="MIT",
    keywords=["adversarial","robustness","generative","stylegan","latent","attack","training"],
    python_requires='>=3.6',
    classifiers = [
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ]
)
