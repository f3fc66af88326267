"""Seeded random instances for test suites and diagnostic sweeps.

All generators draw from a caller-supplied ``numpy.random.Generator`` so the
randomized suites are exactly reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np

from .dense import DenseTensor
from .manifold import ManifoldPoint, make_point, point_to_dense
from .tt import TTTensor, tt_round, tt_to_dense

__all__ = [
    "random_orthonormal",
    "random_tt",
    "random_point",
    "random_dense",
    "perturbed_point",
]


def random_orthonormal(rng, n: int, r: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return q


def random_dense(rng, dims) -> DenseTensor:
    return DenseTensor.from_array(rng.standard_normal(tuple(dims)))


def random_tt(rng, dims, ranks, min_gap_rel=1e-3, max_tries=50) -> TTTensor:
    """Random train with exact interface ranks and a healthy boundary gap.

    Draws i.i.d. cores, rounds to the requested ranks, and retries until the
    smallest interface singular value exceeds ``min_gap_rel`` times the norm.
    """
    from .tt import boundary_gap  # local import to avoid cycle at module load

    dims = tuple(dims)
    bounds = (1,) + tuple(ranks) + (1,)
    for _ in range(max_tries):
        cores = tuple(
            rng.standard_normal((bounds[m], dims[m], bounds[m + 1]))
            for m in range(len(dims))
        )
        t = tt_round(TTTensor(cores), ranks=tuple(ranks))
        if t.ranks != tuple(ranks):
            continue
        try:
            gap = boundary_gap(t)
        except Exception:
            continue
        if gap >= min_gap_rel * tt_to_dense(t).norm():
            return t
    raise RuntimeError("could not draw a train with the requested gap")


def feasible_point_ranks(outer_ranks, tt_ranks) -> bool:
    """Whether a core of full multilinear rank with these train ranks exists.

    The edge outer ranks must equal the edge train ranks (the corresponding
    unfoldings coincide) and interior outer ranks cannot exceed the product
    of the adjacent train ranks.
    """
    r = tuple(outer_ranks)
    if tt_ranks is None:
        return True
    k = (1,) + tuple(tt_ranks) + (1,)
    d = len(r)
    if len(k) != d + 1:
        return False
    if d >= 2 and (r[0] != k[1] or r[-1] != k[-2]):
        return False
    for m in range(1, d - 1):
        if r[m] > k[m] * k[m + 1]:
            return False
    from .tt import max_feasible_ranks

    return all(km <= fm for km, fm in zip(tt_ranks, max_feasible_ranks(r)))


def random_point(
    rng, dims, outer_ranks, tt_ranks=None, min_gap_rel=1e-3, max_tries=50
) -> ManifoldPoint:
    """Random manifold point with orthonormal factors and exact ranks.

    ``tt_ranks=None`` gives a plain Tucker point with a dense core.
    """
    from .errors import InvalidArgumentError
    from .manifold import point_boundary_gap

    dims = tuple(dims)
    outer_ranks = tuple(outer_ranks)
    if not feasible_point_ranks(outer_ranks, tt_ranks):
        raise InvalidArgumentError(
            f"outer ranks {outer_ranks} incompatible with train ranks {tt_ranks}"
        )
    for _ in range(max_tries):
        factors = tuple(
            random_orthonormal(rng, n, r) for n, r in zip(dims, outer_ranks)
        )
        if tt_ranks is None:
            core = random_dense(rng, outer_ranks)
        else:
            try:
                core = random_tt(rng, outer_ranks, tt_ranks, min_gap_rel=min_gap_rel)
            except RuntimeError:
                continue
        try:
            p = make_point(core, factors)
        except Exception:
            continue
        if point_boundary_gap(p) >= min_gap_rel * p.norm():
            return p
    raise RuntimeError("could not draw a manifold point with the requested gap")


def perturbed_point(rng, p: ManifoldPoint, eps: float, direction=None):
    """Retract an ambient perturbation of size ``eps`` back to the manifold.

    Returns the retracted point and the perturbation direction used, so a
    sweep over ``eps`` can reuse one direction.
    """
    from .retraction import retract  # local import to avoid cycle

    x = point_to_dense(p)
    if direction is None:
        direction = random_dense(rng, p.dims)
        direction = direction * (1.0 / direction.norm())
    y = x + eps * direction
    tt_ranks = p.core.ranks if p.tt_core else None
    q = retract(y, p.outer_ranks, tt_ranks)
    return q, direction
