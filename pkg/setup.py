try:
    from setuptools import setup
    from setuptools import find_packages
    packages = find_packages(exclude=["tests", "examples", "examples.*"])
except ImportError:
    from distutils.core import setup
    import os
    packages = [x.strip('./').replace('/','.') for x in os.popen('find prefgame -name "__init__.py" | xargs -n1 dirname').read().strip().split('\n')]

setup(
    name='prefgame',
    version='0.3.0',
    packages=packages,
    package_data={
        "prefgame": ["presets/*.toml"],
    },
    install_requires=[
        "sortedcontainers",
        "toml",
        "filelock",
        "numpy",
        "scipy",
    ],
    entry_points={
        "console_scripts": [
            "prefgame = prefgame.cli:main",
        ],
    },
    description='Tabular equilibrium solvers for two-player preference Markov games.',
    long_description='Optimistic mirror descent and natural actor-critic solvers for constant-sum Markov games '
                     'induced by general preferences, with exact metrics and an experiment runner.',
    long_description_content_type='text/markdown',
)
