"""Exact and numeric tools for post-critically algebraic endomorphisms of CP^2."""

import os as _os

__version__ = "0.1.0"

# PCADYN_THREADS caps the BLAS pools numpy may start; it must be set before numpy loads
_threads = _os.environ.get("PCADYN_THREADS")
if _threads:
    if not _threads.isdigit() or int(_threads) < 1:
        raise ValueError(f"PCADYN_THREADS must be a positive integer, got {_threads!r}")
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)
