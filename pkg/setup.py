#!/usr/bin/env python

import re
from setuptools import setup, find_packages


def get_version():
    """Fetch the project version number from the 'fgeomtools/CLI.py' file."""
    with open("fgeomtools/CLI.py", "r") as fobj:
        for line in fobj:
            matchobj = re.match(r'^VERSION = "(\d+.\d+)"$', line)
            if matchobj:
                return matchobj.group(1)

    return None

setup(
    name="fgeom-tools",
    description="Geometric outlier detection for functional data: MDS and "
                "ISOMAP embeddings scored with the local outlier factor",
    version=get_version(),
    entry_points={
        'console_scripts': ['fgeomtool=fgeomtools.CLI:main'],
    },
    packages=find_packages(exclude=["test*"]),
    install_requires=["six", "numpy>=1.17", "scipy>=1.6"],
    tests_require=["nose", "mock"],
    license='GPLv2',
    long_description="Tools to detect outlying curves in functional data "
                     "sets. Curves are compared with Lp, Wasserstein or "
                     "dynamic time warping distances, embedded into a few "
                     "dimensions with classical multidimensional scaling or "
                     "ISOMAP, and scored with the local outlier factor. "
                     "Fgeomtool also generates labeled synthetic data sets "
                     "and runs replicated, seeded benchmarks of the scoring "
                     "pipelines. See docs/README for the file formats.",
    classifiers=[
        "Programming Language :: Python :: 3"
    ]
)
