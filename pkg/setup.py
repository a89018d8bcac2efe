"""
Install with:
     pip install -e ./

The Biot-Savart kernels are compiled at run time by numba, so there are no
extension modules to build.
"""

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup


setup(
    name = "vpair",
    packages=[
        'vpair',
        'vpair.utils',
        'vpair.vstates',
        'vpair.dataio',
        ],
    version="0.1.0",
    description='Vortex-patch pair V-states by Newton continuation',
    install_requires=[
      'numpy>=1.20.0',
      'scipy',
      'matplotlib',
      'pyyaml',
      'numba',
      'pandas',
      ],
    extras_require={
      'test':['pytest'],
      },
    package_data={'vpair.vstates':['*.yaml']},
    include_package_data=True,
    entry_points={
      'console_scripts':['vpair=vpair.vpairdriver:main'],
      },
    license='LICENSE',
)
