#!/usr/bin/env python
import os
import re
from codecs import open
from setuptools import setup, find_packages

here = os.path.abspath(os.path.dirname(__file__))

# read the version without importing the package
with open(os.path.join(here, 'dstab', 'version.py'), encoding='utf-8') as f:
    __version__ = re.search(r"__version__ = '([^']+)'", f.read()).group(1)

# get dependencies
with open(os.path.join(here, 'requirements.txt'), encoding='utf-8') as f:
    all_reqs = f.read().split('\n')
install_requires = [x.strip() for x in all_reqs if x.strip() and 'git+' not in x]
with open(os.path.join(here, 'requirements-dev.txt'), encoding='utf-8') as f:
    all_reqs = f.read().split('\n')
tests_require = [x.strip() for x in all_reqs if x.strip() and 'git+' not in x]


setup(
    name='dstab',
    version=__version__,
    description='D-stability certification of real matrices with exact rational arithmetic',
    license='Apache 2.0',
    classifiers=[
        'Topic :: Scientific/Engineering :: Mathematics',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11'
    ],
    packages=find_packages(exclude=['docs', 'test*', 'example*']),
    include_package_data=True,
    python_requires='>=3.9',
    install_requires=install_requires,
    tests_require=tests_require,
    entry_points={
        'console_scripts': ['dstab=dstab.cli:cli'],
    },
)
