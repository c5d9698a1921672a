"""Backend selection for the exhaustive-enumeration kernels.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
numpy implementation in ``_pykernels`` takes over. Both produce identical
arrays. ``use_backend`` switches explicitly (benchmarks and tests use it).
"""

from __future__ import annotations

import contextlib

import numpy as np

from . import _pykernels
from .core import VcspInstance, strides
from .errors import ValidationError

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = _BACKENDS.get("cython", _pykernels)

# fitness values live in int64; leave headroom for differences
INT64_SAFE = 2**62


def available_backends() -> list:
    return sorted(_BACKENDS)


def backend_name() -> str:
    return _active.NAME


def use_backend(name: str):
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    _active = _BACKENDS[name]


@contextlib.contextmanager
def backend(name: str):
    previous = _active.NAME
    use_backend(name)
    try:
        yield
    finally:
        use_backend(previous)


def _i64(seq):
    return np.ascontiguousarray(seq, dtype=np.int64)


def fitness_table(instance: VcspInstance) -> np.ndarray:
    """Fitness of every assignment, indexed by assignment code."""
    if instance.fitness_bound() >= INT64_SAFE:
        raise ValidationError(
            "fitness values may exceed the 64-bit range of the enumeration kernels", code="OVERFLOW"
        )
    scope_ptr, scope_vars, table_ptr, table_vals = [0], [], [0], []
    for c in instance.constraints:
        scope_vars.extend(v - 1 for v in c.scope)
        scope_ptr.append(len(scope_vars))
        table_vals.extend(c.values)
        table_ptr.append(len(table_vals))
    return _active.fitness_table(
        _i64(instance.domains),
        _i64(strides(instance.domains)),
        _i64(scope_ptr),
        _i64(scope_vars),
        _i64(table_ptr),
        _i64(table_vals),
    )


def improving_edges(F: np.ndarray, domains) -> tuple:
    return _active.improving_edges(_i64(F), _i64(domains), _i64(strides(domains)))


def longest_path(F: np.ndarray, indptr: np.ndarray, indices: np.ndarray) -> tuple:
    """Per-vertex longest path ending there, and the chosen predecessor.

    Vertices are processed by ascending fitness (ties by code), a valid
    topological order since every edge strictly increases fitness.
    """
    order = np.argsort(F, kind="stable").astype(np.int64)
    return _active.longest_path(order, _i64(indptr), _i64(indices))


def sign_dependence_witness(F: np.ndarray, bit_i: int, bit_j: int) -> int:
    return _active.sign_dependence_witness(_i64(F), int(bit_i), int(bit_j))
