"""Backend selection: compiled kernels when available, Python otherwise.

Both backends expose the same functions and produce bit-identical output
(covered by tests/test_backends.py).  Selection happens once at import;
set LINKFORGE_BACKEND=python or LINKFORGE_BACKEND=compiled to force one.
"""

import os

from . import _kernels_py

_requested = os.environ.get("LINKFORGE_BACKEND", "").strip().lower()

if _requested == "python":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "LINKFORGE_BACKEND=compiled but linkforge._kernels is not built; "
                "reinstall with a C compiler available")
        kernels = _kernels_py

NAME = kernels.NAME

STATUS_OK = _kernels_py.STATUS_OK
STATUS_INFEASIBLE = _kernels_py.STATUS_INFEASIBLE
STATUS_NEAR_SINGULAR = _kernels_py.STATUS_NEAR_SINGULAR
