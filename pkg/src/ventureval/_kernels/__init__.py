"""Kernel backend selection.

The hot inner loops (distance matrices, split search) exist twice: a
compiled Cython extension (``_fast``) and a NumPy fallback (``py``). The
compiled backend is used when the extension imported successfully; the
environment variable ``VENTUREVAL_KERNELS`` (``c`` | ``py``) overrides, and
:func:`set_backend` switches at runtime (used by tests and the benchmark).

Both backends are bit-for-bit interchangeable; everything stochastic stays
in the calling layer, so results do not depend on the backend choice.
"""

from __future__ import annotations

import os

import numpy as np

from . import py as _py

try:
    from . import _fast as _c
except ImportError:  # extension not built
    _c = None

_BACKENDS = {"py": _py}
if _c is not None:
    _BACKENDS["c"] = _c


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    global _impl, _name
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        )
    _impl = _BACKENDS[name]
    _name = name


def backend_name() -> str:
    return _name


_env = os.environ.get("VENTUREVAL_KERNELS", "").strip().lower()
if _env:
    set_backend(_env)
else:
    set_backend("c" if _c is not None else "py")


def _codes(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.int32)


def hamming_matrix(x, modes) -> np.ndarray:
    return _impl.hamming_matrix(_codes(x), _codes(modes))


def pairwise_hamming(x) -> np.ndarray:
    return _impl.pairwise_hamming(_codes(x))


def frequency_dissim(x, modes, match_cost) -> np.ndarray:
    return _impl.frequency_dissim(
        _codes(x), _codes(modes), np.ascontiguousarray(match_cost, dtype=np.float64)
    )


def best_categorical_split(xc, y, rows, feats):
    return _impl.best_categorical_split(
        _codes(xc),
        np.ascontiguousarray(y, dtype=np.int8),
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(feats, dtype=np.int64),
    )
