from setuptools import setup, find_packages


VERSION = '0.1.0'

with open('requirements.txt') as f:
    install_requires = f.read().strip().split('\n')


setup(
    name='strider-core',
    version=VERSION,
    description='Robust bipedal walking pattern generation by nonlinear model predictive control',
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=install_requires,
    extras_require={
        'quadprog': ['qpsolvers[quadprog]>=4.0.0'],
    },
    python_requires='>=3.7',
    entry_points={
        'console_scripts': ['strider = strider.cli:main'],
    },
)
