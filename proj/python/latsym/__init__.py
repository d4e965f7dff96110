"""Python bindings for the lattice symmetry catalog and verifier.

When built with scikit-build-core the extension lives next to this file;
in-tree test runs locate it through LATSYM_EXT_DIR.
"""

import os
import sys

_ext_dir = os.environ.get("LATSYM_EXT_DIR")
if _ext_dir and _ext_dir not in sys.path:
    sys.path.insert(0, _ext_dir)

try:
    from _core import *  # noqa: F401,F403  (in-tree layout)
except ImportError:
    from ._core import *  # noqa: F401,F403  (installed layout)
