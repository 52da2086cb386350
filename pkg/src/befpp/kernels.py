"""Backend selection: compiled core if importable, else the pure-Python kernels."""
import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("BEFPP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND_NAME = "compiled" if compiled_backend is not None else "python"
