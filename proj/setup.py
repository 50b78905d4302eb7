import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

core_sources = sorted(glob.glob("src/*.cpp"))

ext = Pybind11Extension(
    "tracopt._core",
    ["python/bindings.cpp"] + core_sources,
    include_dirs=["include", "vendor"],
    cxx_std=20,
    extra_compile_args=["-O2"],
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
