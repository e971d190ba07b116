#!/usr/bin/env python
# encoding: utf-8

"""
@Author:              Edoardo Altamura
@Year:                2026
@Email:               edoardo.altamura@outlook.com
@Copyright:           Copyright (c) 2026 Edoardo Altamura
@Last Modified by:    Edoardo Altamura
@Latest release:      18 Oct 2026
@Project:             Underwater image enhancement (ADR, desk-scale)

Released under the MIT License. See the LICENSE file in the project root.
"""

import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

with open("src/__version__.py", "r") as fh:
    exec_output = {}
    exec(fh.read(), exec_output)
    __version__ = exec_output["__version__"]

with open("requirements.txt", "r") as f:
    required = [line for line in f.read().splitlines() if line and not line.startswith('#')]

setuptools.setup(
    name="adr-underwater",
    version=__version__,
    description="Desk-scale three-stage underwater image enhancement: physics-guided dehazing, Retinex "
                "decomposition and a U-Net++ enhancer, with a degradation simulator and a numpy autodiff engine.",
    author="Edoardo Altamura",
    author_email="edoardo.altamura@outlook.com",
    packages=setuptools.find_packages(exclude=["tests", "examples", "examples.*"]),
    long_description=long_description,
    long_description_content_type="text/markdown",
    zip_safe=False,
    classifiers=[
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    install_requires=required,
    include_package_data=True,
    package_data={"src": ["mplstyles/*.mplstyle"]},
    entry_points={"console_scripts": ["adr=src.cli:main"]},
)
