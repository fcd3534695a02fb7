"""Backend selection for the hot quadrature kernels.

The compiled extension is used when present; set HANKELLAB_PURE_PYTHON=1
to force the numpy fallback (useful for parity testing and debugging).
"""

import os

from . import _pykern

if os.environ.get("HANKELLAB_PURE_PYTHON"):
    _impl = _pykern
else:
    try:
        from . import _ckern as _impl
    except ImportError:
        _impl = _pykern

BACKEND_NAME = _impl.BACKEND_NAME
integrate_family = _impl.integrate_family


def available_backends():
    names = ["python"]
    try:
        from . import _ckern  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
