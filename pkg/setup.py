#!/usr/bin/env python

from setuptools import setup, find_packages

# see: http://bugs.python.org/issue15881
try:
    import multiprocessing
except ImportError:
    pass

install_requires = [
    'numpy>=1.17',
    'scipy>=1.4',
]

try:
    tests_requires = open('requirements.txt').read().splitlines()
except IOError:
    tests_requires = []

long_description = ''
try:
    long_description = open('README.rst').read()
except IOError:
    pass

setup(
    name='steerkey',
    version='0.1.0a0',
    description='Certified key rates for one-sided device-independent QKD',
    long_description=long_description,
    packages=find_packages('.', exclude=['tests', 'tests.*']),
    zip_safe=False,
    install_requires=install_requires,
    license='MIT',
    tests_require=tests_requires,
    test_suite='runtests.runtests',
    include_package_data=True,
    entry_points={
        'console_scripts': [
            'steerkey = steerkey.cli:main',
        ],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Physics',
    ],
)
