#!/usr/bin/env python
import os
from setuptools import find_packages, setup

version = '0.1.0'
PATH_ROOT = os.path.dirname(__file__)


def load_requirements(path_dir=PATH_ROOT, comment_char='#'):
    with open(os.path.join(path_dir, 'requirements.txt'), 'r') as file:
        lines = [ln.strip() for ln in file.readlines()]
    reqs = []
    for ln in lines:
        # filer all comments
        if comment_char in ln:
            ln = ln[:ln.index(comment_char)]
        if ln:  # if requirement is not empty
            reqs.append(ln)
    return reqs


setup(
    name='torus_queens',
    packages=find_packages(exclude=['tests', 'examples', 'examples.*']),
    version=version,
    description='Constructions, certificates and exact search for independent queens on Z_n^d',
    install_requires=load_requirements(PATH_ROOT),
    python_requires='>=3.8',
    entry_points={
        'console_scripts': ['torus-queens=torus_queens.cli:main'],
    },
    keywords=[
        'queens',
        'torus',
        'combinatorics',
        'number theory',
        'branch and bound',
    ],
)
