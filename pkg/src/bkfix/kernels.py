"""Backend selection for the bit-vector kernels.

The compiled module is used when it imports and ``BKFIX_PURE`` is unset.
Calls touching carriers wider than 64 states always go to the pure-Python
twin, since the compiled masks are 64-bit.
"""

import os

from bkfix import _pykernels as python

compiled = None
if os.environ.get("BKFIX_PURE", "") in ("", "0"):
    try:
        from bkfix import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

BACKEND = "compiled" if compiled is not None else "python"
WORD = 64


def for_width(*widths):
    """Kernel module able to handle masks over carriers of these sizes."""
    if compiled is not None and max(widths, default=0) <= WORD:
        return compiled
    return python


def active():
    return compiled if compiled is not None else python
