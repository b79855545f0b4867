from setuptools import setup, find_packages

setup(
    name="wavegraph",
    version="0.1.0",
    packages=find_packages(include=["wavegraph", "wavegraph.*"]),
    package_data={"wavegraph": ["presets/*.json"]},
    install_requires=[
        "numba>=0.59",
        "numpy>=1.26",
        "pandas>=2.2.2",
        "psutil>=7.0.0",
        "python-dotenv",
        "scipy>=1.12",
    ],
)
