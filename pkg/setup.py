import setuptools

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt") as f:
    install_requires = f.read().splitlines()


setuptools.setup(
    name="subsystem-codes",
    version="0.4.0",
    description="Bravyi-Bacon-Shor and subsystem hypergraph product codes from classical codes, with induced "
    "decoders and phenomenological and circuit-level noise simulation.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=["Programming Language :: Python :: 3", "Operating System :: OS Independent"],
    packages=setuptools.find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    python_requires=">=3.8",
    install_requires=install_requires,
    extras_require={"dev": ["pytest>=7"]},
    entry_points={"console_scripts": ["subsystem-codes=subsystem_codes.cli:main"]},
    include_package_data=True,
)
