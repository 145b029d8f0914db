"""Python interface to the neuroloop C++ library."""

import sys

from ._core import *  # noqa: F401,F403
from ._core import NeuroloopError, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]


def main():
    code, out, err = run_cli(sys.argv[1:])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
