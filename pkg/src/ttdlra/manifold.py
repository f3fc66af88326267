"""Constrained Tucker points: a small core carried by tall factor matrices.

A point is ``X = C x_0 U^0 x_1 ... x_{d-1} U^{d-1}`` with factors
``U^m`` of shape ``(N_m, r_m)`` whose Gramians are invertible.  The core ``C``
either is a :class:`~ttdlra.tt.TTTensor` over the small sizes
``(r_0, ..., r_{d-1})`` with exact interface ranks ``k`` (the inner train
constraint), or a dense tensor of full multilinear rank (the plain Tucker
case, where the core set is open and carries no extra constraint).

Because the core constraint set is invariant under invertible basis changes,
a point with merely independent factor columns can always be re-expressed
with orthonormal factors by absorbing the triangular QR factors into the
core; :func:`make_point` does this by default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import DenseTensor, mode_multiply
from .errors import InvalidArgumentError, NotOnManifoldError
from .tt import TTTensor, interface_spectrum, mode_spectrum, tt_to_dense, tt_scale

__all__ = [
    "ManifoldPoint",
    "make_point",
    "point_to_dense",
    "point_boundary_gap",
    "scale_point",
    "GAP_REJECT_REL",
]

# points whose relative boundary gap is below this are rejected as
# numerically off-manifold (the evolution theory breaks at the boundary)
GAP_REJECT_REL = 1e-10

# factor Gramians with smaller relative eigenvalue floor count as singular
_GRAM_REJECT_REL = 1e-12


@dataclass(frozen=True)
class ManifoldPoint:
    """Validated constrained Tucker point; construct via :func:`make_point`."""

    core: object  # TTTensor or DenseTensor
    factors: tuple
    orthonormal_factors: bool

    @property
    def ndim(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> tuple:
        return tuple(u.shape[0] for u in self.factors)

    @property
    def outer_ranks(self) -> tuple:
        return tuple(u.shape[1] for u in self.factors)

    @property
    def tt_core(self) -> bool:
        return isinstance(self.core, TTTensor)

    def core_dense(self) -> DenseTensor:
        return tt_to_dense(self.core) if self.tt_core else self.core

    def norm(self) -> float:
        if self.orthonormal_factors:
            return self.core_dense().norm()
        return point_to_dense(self).norm()


def _core_dims(core) -> tuple:
    return core.dims


def make_point(core, factors, orthonormalize=True) -> ManifoldPoint:
    """Validate a (core, factors) pair and return a manifold point.

    Parameters
    ----------
    core : TTTensor or DenseTensor
        Core over the small sizes; a train core must carry exact interface
        ranks, a dense core full multilinear rank.
    factors : sequence of ndarray
        One ``(N_m, r_m)`` matrix per mode with independent columns.
    orthonormalize : bool
        Re-express the point with orthonormal factors by absorbing the
        triangular QR factors into the core (the represented tensor is
        unchanged).  With ``False`` the factors are kept as given.

    Raises
    ------
    NotOnManifoldError
        If a factor Gramian is numerically singular, the core is rank
        deficient, or the boundary gap falls below ``GAP_REJECT_REL``
        relative to the norm.
    """
    if not isinstance(core, (TTTensor, DenseTensor)):
        raise InvalidArgumentError("core must be a TTTensor or DenseTensor")
    factors = tuple(np.asarray(u, dtype=float) for u in factors)
    cdims = _core_dims(core)
    if len(factors) != len(cdims):
        raise InvalidArgumentError(
            f"{len(factors)} factors for a core of order {len(cdims)}"
        )
    for m, u in enumerate(factors):
        if u.ndim != 2:
            raise InvalidArgumentError("factors must be matrices")
        if u.shape[1] != cdims[m]:
            raise InvalidArgumentError(
                f"factor {m} has {u.shape[1]} columns, core size is {cdims[m]}"
            )
        if u.shape[0] < u.shape[1]:
            raise NotOnManifoldError(f"factor {m} has more columns than rows")

    ortho = True
    for m, u in enumerate(factors):
        g = u.T @ u
        ev = np.linalg.eigvalsh(g)
        if ev[0] <= _GRAM_REJECT_REL * max(ev[-1], np.finfo(float).tiny):
            raise NotOnManifoldError(f"factor {m} has a numerically singular Gramian")
        if not np.allclose(g, np.eye(u.shape[1]), atol=1e-12):
            ortho = False

    if orthonormalize and not ortho:
        new_factors = []
        for m, u in enumerate(factors):
            q, r = np.linalg.qr(u)
            new_factors.append(q)
            if isinstance(core, TTTensor):
                cores = list(core.cores)
                cores[m] = np.einsum("ij,ajb->aib", r, cores[m])
                core = TTTensor(tuple(cores))
            else:
                core = mode_multiply(core, r, m)
        factors = tuple(new_factors)
        ortho = True

    point = ManifoldPoint(core=core, factors=factors, orthonormal_factors=ortho)
    _validate_core_ranks(point)
    return point


def _validate_core_ranks(point: ManifoldPoint):
    core = point.core
    cdense = point.core_dense()
    scale = max(cdense.norm(), np.finfo(float).tiny)
    if isinstance(core, TTTensor) and core.ndim > 1:
        spec = interface_spectrum(core)
        if min(v[-1] for v in spec.values) <= GAP_REJECT_REL * scale:
            raise NotOnManifoldError(
                "core interface spectrum is below the boundary rejection threshold"
            )
    if cdense.ndim > 1:
        mspec = mode_spectrum(cdense)
        if min(v[-1] for v in mspec.values) <= GAP_REJECT_REL * scale:
            raise NotOnManifoldError("core does not have full multilinear rank")


def point_to_dense(p: ManifoldPoint) -> DenseTensor:
    """Expand the point into the ambient space by a chain of mode products."""
    out = p.core_dense()
    for m, u in enumerate(p.factors):
        out = mode_multiply(out, u, m)
    return out


def point_boundary_gap(p: ManifoldPoint) -> float:
    """Smallest singular value over the core's interface and mode unfoldings.

    With orthonormal factors these spectra coincide with the corresponding
    spectra of the expanded tensor, so the value bounds the distance of the
    point to the relative boundary of the manifold from above.  For matrices
    the bound is the exact distance.
    """
    cdense = p.core_dense()
    vals = []
    if p.tt_core and p.core.ndim > 1:
        vals.extend(float(v[-1]) for v in interface_spectrum(p.core).values)
    if cdense.ndim > 1:
        vals.extend(float(v[-1]) for v in mode_spectrum(cdense).values)
    if not vals:
        return cdense.norm()
    return min(vals)


def scale_point(p: ManifoldPoint, s: float) -> ManifoldPoint:
    """Scale the represented tensor by ``s > 0`` (the manifold is a cone)."""
    if s <= 0:
        raise InvalidArgumentError("cone scaling requires s > 0")
    core = tt_scale(p.core, s) if p.tt_core else p.core * s
    return ManifoldPoint(
        core=core, factors=p.factors, orthonormal_factors=p.orthonormal_factors
    )
