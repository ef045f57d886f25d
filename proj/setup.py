from glob import glob

from pybind11.setup_helpers import ParallelCompile, Pybind11Extension, build_ext
from setuptools import setup

ParallelCompile("LUNGPIPE_BUILD_JOBS", default=8).install()

ext = Pybind11Extension(
    "lungpipe._lungpipe",
    sources=sorted(glob("src/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)
ext.extra_compile_args.append("-pthread")
ext.extra_link_args.append("-pthread")

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
