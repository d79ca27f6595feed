#!/usr/bin/env python3

from setuptools import find_packages, setup

from crossprompt import __version__

requirements = [
    "Django>=3.2,<5.0",
    "djangorestframework>=3.12",
    "dynaconf>=3.1",
    "PyYAML>=5.3",
    "prometheus-client>=0.8.0",
    "tablib[cli]>=3.0",
    "logstash_formatter>=0.5.17",
    "numpy>=1.21",
    "scipy>=1.7",
    "safetensors>=0.3.1",
    "crcmod>=1.7",
]

setup(
    name="crossprompt",
    version=__version__,
    description="Cross-lingual soft prompt tuning with a prompt encoder, on a desk-scale backbone",
    license="GPLv2+",
    python_requires=">=3.8",
    setup_requires=["wheel"],
    install_requires=requirements,
    include_package_data=True,
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=(
        "License :: OSI Approved :: GNU General Public License v2 or later (GPLv2+)",
        "Operating System :: POSIX :: Linux",
        "Framework :: Django",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ),
    entry_points={"console_scripts": ["crossprompt = crossprompt.manage:main"]},
)
