"""Dense tensor algebra: storage, unfoldings, mode products, SVD, Gramians.

Index convention
----------------
A tensor with mode sizes ``(N_0, ..., N_{d-1})`` is flattened in column-major
(Fortran) order: mode 0 is the fastest running index.  All matricizations
enumerate their row and column multi-indices the same way, with the smallest
participating mode fastest.  Golden files depend on this ordering, so it is
fixed.

All scalars are 64-bit floats; the tolerances used throughout the package are
calibrated to double precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "DenseTensor",
    "SvdResult",
    "matricize",
    "tensorize",
    "mode_multiply",
    "multi_mode_multiply",
    "svd",
    "inner",
    "norm",
    "gram",
    "dense_to_json",
    "dense_from_json",
]


@dataclass(frozen=True)
class DenseTensor:
    """A d-way array over a multi-index grid.

    Parameters
    ----------
    dims : tuple of int
        Positive mode sizes ``(N_0, ..., N_{d-1})``.
    data : numpy.ndarray
        Flat array of length ``prod(dims)`` in column-major order
        (mode 0 fastest).
    """

    dims: tuple
    data: np.ndarray

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 1 or any(n < 1 for n in dims):
            raise InvalidArgumentError(f"invalid mode sizes {dims}")
        data = np.asarray(self.data, dtype=float).reshape(-1)
        if data.size != int(np.prod(dims)):
            raise InvalidArgumentError(
                f"data length {data.size} does not match dims {dims}"
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, arr) -> "DenseTensor":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        return cls(arr.shape, arr.ravel(order="F"))

    @classmethod
    def zeros(cls, dims) -> "DenseTensor":
        return cls(tuple(dims), np.zeros(int(np.prod(dims))))

    def to_array(self) -> np.ndarray:
        """Return the tensor as an ndarray of shape ``dims``."""
        return self.data.reshape(self.dims, order="F")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return self.data.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __add__(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        if other.dims != self.dims:
            raise InvalidArgumentError("mode sizes differ")
        return DenseTensor(self.dims, self.data + other.data)

    def __sub__(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        if other.dims != self.dims:
            raise InvalidArgumentError("mode sizes differ")
        return DenseTensor(self.dims, self.data - other.data)

    def __mul__(self, s):
        return DenseTensor(self.dims, self.data * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return DenseTensor(self.dims, -self.data)


@dataclass(frozen=True)
class SvdResult:
    """Thin singular value decomposition ``M = U diag(s) V^T``.

    ``left_vectors`` and ``right_vectors`` have orthonormal columns and
    ``singular_values`` is nonincreasing and nonnegative.
    """

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray

    @property
    def rank(self) -> int:
        """Numerical rank: count of ``s_k > max(rows, cols) * eps * s_0``."""
        s = self.singular_values
        if s.size == 0 or s[0] == 0.0:
            return 0
        m = self.left_vectors.shape[0]
        n = self.right_vectors.shape[0]
        tol = max(m, n) * np.finfo(float).eps * s[0]
        return int(np.count_nonzero(s > tol))

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.T


def _check_split(split, d):
    split = tuple(sorted(int(m) for m in split))
    if len(split) == 0:
        raise InvalidArgumentError("split must be nonempty")
    if len(set(split)) != len(split):
        raise InvalidArgumentError("split contains repeated modes")
    if any(m < 0 or m >= d for m in split):
        raise InvalidArgumentError(f"split {split} out of range for order {d}")
    if len(split) == d:
        raise InvalidArgumentError("split must be a proper subset of the modes")
    rest = tuple(m for m in range(d) if m not in split)
    return split, rest


def matricize(x: DenseTensor, split) -> np.ndarray:
    """Unfold ``x`` into a matrix whose rows carry the ``split`` modes.

    Rows enumerate the split modes in increasing mode order with the first
    one fastest; columns do the same for the complementary modes.  The map
    is a linear bijection inverted by :func:`tensorize`.
    """
    split, rest = _check_split(split, x.ndim)
    arr = x.to_array().transpose(split + rest)
    m = int(np.prod([x.dims[i] for i in split]))
    n = int(np.prod([x.dims[i] for i in rest]))
    return arr.reshape((m, n), order="F")


def tensorize(mat, split, dims) -> DenseTensor:
    """Inverse of :func:`matricize` for the given split and mode sizes."""
    dims = tuple(int(n) for n in dims)
    split, rest = _check_split(split, len(dims))
    mat = np.asarray(mat, dtype=float)
    m = int(np.prod([dims[i] for i in split]))
    n = int(np.prod([dims[i] for i in rest]))
    if mat.shape != (m, n):
        raise InvalidArgumentError(
            f"matrix shape {mat.shape} does not match split {split} of {dims}"
        )
    shape = tuple(dims[i] for i in split) + tuple(dims[i] for i in rest)
    arr = mat.reshape(shape, order="F")
    perm = split + rest
    return DenseTensor.from_array(arr.transpose(np.argsort(perm)))


def mode_multiply(x: DenseTensor, m, mode: int) -> DenseTensor:
    """Left-multiply the matrix ``m`` onto mode ``mode`` of ``x``."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise InvalidArgumentError("mode factor must be a matrix")
    if mode < 0 or mode >= x.ndim:
        raise InvalidArgumentError(f"mode {mode} out of range")
    if m.shape[1] != x.dims[mode]:
        raise InvalidArgumentError(
            f"matrix has {m.shape[1]} columns, mode {mode} has size {x.dims[mode]}"
        )
    arr = np.tensordot(m, x.to_array(), axes=(1, mode))
    arr = np.moveaxis(arr, 0, mode)
    return DenseTensor.from_array(arr)


def multi_mode_multiply(x: DenseTensor, mats) -> DenseTensor:
    """Apply one matrix per mode; ``None`` entries leave a mode untouched."""
    out = x
    for mode, m in enumerate(mats):
        if m is not None:
            out = mode_multiply(out, m, mode)
    return out


def svd(m) -> SvdResult:
    """Thin SVD with a finiteness check on the input."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise InvalidArgumentError("svd expects a matrix")
    if not np.all(np.isfinite(m)):
        raise InvalidArgumentError("svd input contains non-finite entries")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return SvdResult(u, s, vh.T)


def inner(x: DenseTensor, y: DenseTensor) -> float:
    """Frobenius pairing of two tensors with equal mode sizes."""
    if x.dims != y.dims:
        raise InvalidArgumentError(f"mode sizes differ: {x.dims} vs {y.dims}")
    return float(np.dot(x.data, y.data))


def norm(x: DenseTensor) -> float:
    return x.norm()


def gram(u) -> np.ndarray:
    """Gramian ``U^T U`` of the columns of ``u``."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 2:
        raise InvalidArgumentError("gram expects a matrix")
    return u.T @ u


def dense_to_json(x: DenseTensor) -> str:
    """Serialize to a flat JSON record ``{"dims": [...], "data": [...]}``.

    Floats are written with Python's shortest round-trip repr, so identical
    tensors always produce identical bytes.
    """
    return json.dumps(
        {"dims": list(x.dims), "data": [float(v) for v in x.data]},
        separators=(",", ":"),
    )


def dense_from_json(text: str) -> DenseTensor:
    rec = json.loads(text)
    return DenseTensor(tuple(rec["dims"]), np.array(rec["data"], dtype=float))
