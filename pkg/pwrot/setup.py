"""
Packaging for pwrot. This directory is the package itself, so
`pip install -e pwrot/` maps it onto the import name and installs the
`pwrot` console script.
"""
import re
from pathlib import Path

from setuptools import find_packages, setup

HERE = Path(__file__).parent


def read_version() -> str:
    match = re.search(r'^__version__ = "([^"]+)"', (HERE / "__init__.py").read_text(), re.M)
    if match is None:
        raise RuntimeError("pwrot/__init__.py has no __version__")
    return match.group(1)


def read_requirements() -> list:
    """Requirement lines with trailing comments stripped."""
    path = HERE / "requirements.txt"
    if not path.exists():
        return []
    lines = (line.split("#")[0].strip() for line in path.read_text().splitlines())
    return [line for line in lines if line]


readme = HERE / "README.md"

setup(
    name="pwrot",
    version=read_version(),
    description="Piecewise rotations of the plane: limit-set bounds, periodic islands and rasters",
    long_description=readme.read_text() if readme.exists() else "",
    long_description_content_type="text/markdown",
    package_dir={"pwrot": "."},
    packages=["pwrot"] + [f"pwrot.{name}" for name in find_packages(exclude=["tests", "tests.*"])],
    package_data={"pwrot": ["config.yaml", "data/*.json"]},
    include_package_data=True,
    install_requires=read_requirements(),
    entry_points={"console_scripts": ["pwrot=pwrot.cli:main"]},
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
    ],
    keywords="piecewise isometry rotation dynamics continued fractions limit set",
)
