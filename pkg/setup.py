from __future__ import annotations

from pathlib import Path

from setuptools import find_namespace_packages, setup

readme_file = Path(__file__).parent / 'README.md'
if readme_file.exists():
    with readme_file.open() as f:
        long_description = f.read()
else:
    long_description = ''

setup(
    name='livecastlab',
    description='Trace-driven lab for FEC and quality scheduling of live uplinks over LEO links',
    # Determine version with scm
    use_scm_version={'version_scheme': 'post-release'},
    long_description=long_description,
    long_description_content_type='text/markdown',
    license='Apache 2.0',
    keywords='',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python',
        'Topic :: System :: Networking',
    ],
    python_requires='>=3.11',
    packages=find_namespace_packages(include=['livecastlab*']),
    include_package_data=True,
    package_data={'livecastlab.crf_model': ['data/*.json']},
    install_requires=[
        'celery',
        'click',
        'joblib',
        'jsonschema>=4',
        'more_itertools',
        'numpy>=1.24',
        'pandas>=2',
        'scipy',
        'tqdm',
    ],
    extras_require={
        'dev': [
            'ipython',
            'tox',
            'pandas-stubs',
            'types-jsonschema',
            'types-setuptools',
            'types-tqdm',
        ],
        'test': [
            'factory-boy',
            'pytest',
            'pytest-cov',
            'pytest-factoryboy',
            'pytest-mock',
        ],
    },
    entry_points={
        'console_scripts': ['livecastlab=livecastlab.commands:cli'],
    },
)
