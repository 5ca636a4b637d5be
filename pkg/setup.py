from setuptools import setup, find_packages

setup(
    name='semiblind',
    version="0.2.0",
    description='SEMI-BLIND CHANNEL ESTIMATION FOR LEO MASSIVE MIMO UPLINKS',
    author='Fausto Milletari',
    packages=find_packages(exclude=['tests']),
    package_data={'semiblind': ['configs/*.cfg', 'configs/*.json']},
    install_requires=[
        'numpy',
        'scipy',
        'twisted',
        'click>=7.0',
        'tinydb>=4.0',
    ],
    entry_points={
        'console_scripts': [
            'semiblind = semiblind.harness.cli:main',
        ],
    },
)
