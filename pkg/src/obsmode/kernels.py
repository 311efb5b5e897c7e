"""Backend selection for the synthesis kernels.

The compiled extension is used when it was built; otherwise, or when
``OBSMODE_PURE=1`` is set, the pure-Python module is used.  Both return
identical results.
"""

import os

from . import _kernels_py

try:
    from . import _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

BACKENDS = {"python": _kernels_py}
if _kernels_c is not None:
    BACKENDS["compiled"] = _kernels_c

if _kernels_c is not None and os.environ.get("OBSMODE_PURE", "") not in ("1", "true"):
    DEFAULT = "compiled"
else:
    DEFAULT = "python"


def get(name=None):
    if name is None:
        name = DEFAULT
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None
