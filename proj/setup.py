import glob
import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

sources = sorted(
    s for s in glob.glob("src/*.cpp") if not s.endswith("cli_main.cpp")
)

eigen_include = os.environ.get("EIGEN_INCLUDE_DIR", "/usr/include/eigen3")

ext = Pybind11Extension(
    "rsloc._core",
    sources,
    include_dirs=["include", "vendor", eigen_include],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
