"""Kernel selection: compiled rank routine when built, pure Python otherwise.

The compiled module is an optional Cython build of the same Bareiss
elimination; both expose rank_int with identical semantics, so callers
import from here and never care which one is active.
"""

from __future__ import annotations

try:
    from srk import _rankcore as _impl

    HAVE_COMPILED = True
except ImportError:
    from srk import _rankcore_py as _impl

    HAVE_COMPILED = False

rank_int = _impl.rank_int
