"""Selects the VM backend at import time.

The compiled ``_vm`` extension is used when it is importable; setting the
environment variable ``DIFUZZ_PURE_PYTHON`` forces the pure-Python fallback.
"""

import os

from . import _vm_py

if os.environ.get("DIFUZZ_PURE_PYTHON"):
    _impl = _vm_py
else:
    try:
        from . import _vm as _impl
    except ImportError:  # extension not built
        _impl = _vm_py

BACKEND = "python" if _impl is _vm_py else "cython"
run = _impl.run
run_python = _vm_py.run


def compiled_run():
    """Return the compiled ``run`` or ``None`` when unavailable."""
    try:
        from . import _vm
    except ImportError:
        return None
    return _vm.run
