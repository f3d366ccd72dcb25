"""Selects the TreeRePair kernel: compiled if available, else pure Python.

Set ``PROOFGRAM_PURE=1`` to force the pure-Python kernel.
"""

import os

if os.environ.get("PROOFGRAM_PURE"):
    from ._pytreestore import TreeStore
    COMPILED = False
else:
    try:
        from ._ctreestore import TreeStore
        COMPILED = True
    except ImportError:
        from ._pytreestore import TreeStore
        COMPILED = False

__all__ = ["TreeStore", "COMPILED"]
