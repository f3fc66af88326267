"""Retraction of an ambient tensor onto the constrained Tucker manifold.

The map truncates mode by mode to the outer ranks (sequentially truncated
higher-order SVD) and then rounds the resulting core to the inner train
ranks.  Each stage is an orthogonal projection, so the retraction never
increases the norm, and it reproduces points that already have the target
ranks exactly.
"""

from __future__ import annotations

import numpy as np

from .dense import DenseTensor, matricize, mode_multiply
from .manifold import ManifoldPoint, make_point
from .tt import tt_from_dense

__all__ = ["retract"]


def retract(x: DenseTensor, outer_ranks, tt_ranks=None) -> ManifoldPoint:
    """Quasi-optimal projection of ``x`` onto the points of the given ranks.

    Parameters
    ----------
    x : DenseTensor
    outer_ranks : tuple of int
        Target mode ranks ``(r_0, ..., r_{d-1})``.
    tt_ranks : tuple of int, optional
        Target interface ranks of the core; ``None`` keeps a dense core
        (plain Tucker retraction).

    Raises
    ------
    NotOnManifoldError
        If the truncated tensor is rank deficient at the target ranks
        (rank collapse).
    """
    outer_ranks = tuple(int(r) for r in outer_ranks)
    if x.ndim == 1:
        # single mode: the only manifold is the full space
        if outer_ranks != (x.dims[0],):
            raise InvalidArgumentError("single-mode points must have full rank")
        core = x
        if tt_ranks is not None:
            core = tt_from_dense(x)
        return make_point(core, (np.eye(x.dims[0]),), orthonormalize=False)
    factors = []
    work = x
    for m, r in enumerate(outer_ranks):
        mat = matricize(work, {m})
        u, _, _ = np.linalg.svd(mat, full_matrices=False)
        u = u[:, :r]
        factors.append(u)
        work = mode_multiply(work, u.T, m)
    core = work
    if tt_ranks is not None:
        core = tt_from_dense(core, ranks=tuple(tt_ranks))
    return make_point(core, factors, orthonormalize=False)
