"""
Entry point for installing the package.
"""

# Native Library | setuptools
from setuptools import setup, find_packages

# (1): Use setup() to... set up the package:
setup(
    name = "centrank",
    version = "0.1.0",
    description = "Rank vertices of large networks by betweenness and closeness: exactly, by sampling, or with a trained neural network.",
    author = "Woofmagic",
    author_email = "none@none.none",
    url = "https://github.com/Woofmagic/centrank",
    project_urls = {
        "Sources": "https://github.com/Woofmagic/centrank",
        "Bug Tracker": "https://github.com/Woofmagic/centrank/issues",
    },
    packages = find_packages(include = ["centrank_lib", "centrank_lib.*"]),
    install_requires = [
        "numpy",
        "scipy",
    ],
    extras_require = {
        "test": ["networkx"],
    },
    entry_points = {
        "console_scripts": ["centrank = centrank_lib.cli:main"],
    },
    classifiers = [
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Developers',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Information Analysis',
        'Natural Language :: English'
    ],
    keywords = [
        'Network Science',
        'Centrality',
        'Betweenness',
        'Closeness',
        'Graph Sampling',
        'Neural Networks',
        'Levenberg-Marquardt',
        'NumPy',
        'SciPy',
    ],
    python_requires = '>=3.9',
)
