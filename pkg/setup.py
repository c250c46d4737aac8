# Copyright 2024 The tickcast Authors.

from setuptools import find_packages, setup

install_requires = [
    "dacite",
    "numpy",
    "scipy>=1.9",
    "pandas>=1.5",
    "numba",
    "tqdm",
]

extras_require = {
    "test": ["pytest"],
}

VERSION = {}  # type: ignore
with open("tickcast/__version__.py", "r") as version_file:
    exec(version_file.read(), VERSION)


setup(
    name="tickcast",
    description="tickcast: next-tick return-sign forecasting from limit order book events",
    version=VERSION["version"],
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    author="The tickcast Authors",
    install_requires=install_requires,
    extras_require=extras_require,
    packages=find_packages(include=["tickcast", "tickcast.*"], exclude="tests"),
    entry_points={"console_scripts": ["tickcast=tickcast.cli:main"]},
    python_requires=">=3.8.0",
    classifiers=[
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Intended Audience :: Financial and Insurance Industry",
        "Intended Audience :: Science/Research",
        "Topic :: Office/Business :: Financial :: Investment",
    ],
    package_data={},
    dependency_links=[],
    include_package_data=True,
    zip_safe=False,
)
