#!/usr/bin/env python3

"""parkrr Setup
See also:
https://packaging.python.org/en/latest/distributing.html
https://github.com/pypa/sampleproject
"""

from os import path

# Always prefer setuptools over distutils
from setuptools import setup, find_packages


here = path.abspath(path.dirname(__file__))

setupdict = dict(
    name='parkrr',

    # Versions should comply with PEP440.  For a discussion on single-sourcing
    # the version across setup.py and the project code, see
    # https://packaging.python.org/en/latest/single_source_version.html
    version='1.0.0',

    description='Partitioned kernel ridge regression with sketched preconditioned solvers',
    # long_description=long_description,

    # Author details
    author='parkrr developers',

    # Choose your license
    license='GPL-3.0',

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        # How mature is this project? Common values are
        #   3 - Alpha
        #   4 - Beta
        #   5 - Production/Stable
        'Development Status :: 4 - Beta',

        # Indicate who your project is intended for
        'Topic :: Scientific/Engineering :: Mathematics',
        'Intended Audience :: Science/Research',

        # Pick your license as you wish (should match "license" above)
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',

        # Supported Python versions
        'Programming Language :: Python :: 3',
    ],

    # What does your project relate to?
    keywords='kernel ridge regression Nystrom conjugate gradient partitioning',

    # Includes data files from MANIFEST.in
    #
    # See also:
    # http://stackoverflow.com/a/16576850
    # https://pythonhosted.org/setuptools/setuptools.html#including-data-files
    include_package_data = True,

    python_requires='>=3.8',

    install_requires=[
        'numpy>=1.20', 'scipy>=1.6',
        'scikit-learn>=0.24', 'prettytable>=0.7.2',
    ],

    # You can just specify the packages manually here if your project is
    # simple. Or you can use find_packages().
    packages=find_packages('source'),
    package_dir={'': 'source'},

    # If there are data files included in your packages that need to be
    # installed, specify them here.
    package_data={
        'parkrr': ['templates/*'],
    },

    # To provide executable scripts, use entry points in preference to the
    # "scripts" keyword. Entry points provide cross-platform support and allow
    # pip to create the appropriate form of executable for the target platform.
    entry_points={
        'console_scripts': [
            'parkrr=parkrr:main',
        ],
    },

    # Required packages for testing
    tests_require=['pytest', 'mock'],
)

# Call it:
setup(**setupdict)
