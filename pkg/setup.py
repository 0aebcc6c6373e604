from setuptools import setup

setup(
    name = "hitchin-sov",
    version = "0.1",
    license = "MIT",
    packages = [
        'hitchin_sov',
        'hitchin_sov.management',
        'hitchin_sov.management.commands',
        'hitchin_sov.tests',
    ],
    package_data = {
        'hitchin_sov': ['fixtures/*.json'],
    },
    install_requires = [
        'Django>=3.2',
        'django-appconf',
        'numpy',
        'scipy',
    ],
    extras_require = {
        'tests': [
            'pytest',
            'hypothesis',
        ],
    },
    entry_points = {
        'console_scripts': [
            'hitchin-sov = hitchin_sov.__main__:main',
        ],
    },
)
