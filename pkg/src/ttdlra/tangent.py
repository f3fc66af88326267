"""Tangent spaces of constrained Tucker manifolds: projectors and diagnostics.

A tangent vector at ``X = C x_0 U^0 ... x_{d-1} U^{d-1}`` is parametrized as

    V = Cdot x_0 U^0 ... x_{d-1} U^{d-1}
        + sum_m  C x_0 U^0 ... x_m Udot^m ... x_{d-1} U^{d-1}

with ``Cdot`` in the tangent space of the core constraint set and the gauge
conditions ``(U^m)^T Udot^m = 0``.  The d+1 summands live in mutually
orthogonal subspaces, so the orthogonal projector onto the tangent space
splits into d+1 independent pieces: one core piece acting on the compressed
coefficients and one per mode acting on the corresponding matricization.

For a tensor-train core the core projector itself splits along the train
interfaces into projectors built from prefix and suffix interface bases.

The module also houses an independent brute-force oracle (span, orthonormalize,
project), polar alignment of subspace bases, and curvature reports comparing
observed projector differences and normal defects against the theoretical
bounds ``2d(3*sqrt(2)+1)/sigma`` and ``sqrt(2d-1)/sigma`` for the outer
manifold and ``4d/sigma`` and ``sqrt(d-1)/sigma`` for the fixed-rank train
manifold, where ``sigma`` is the distance to the relative boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import DenseTensor, matricize, mode_multiply
from .errors import (
    DegeneratePointError,
    IllConditionedPointError,
    InvalidArgumentError,
    OversizeError,
)
from .manifold import ManifoldPoint, point_boundary_gap, point_to_dense
from .tt import TTTensor, orthogonalize, tt_to_dense

__all__ = [
    "TangentVector",
    "TangentBasis",
    "CurvatureReport",
    "AlignedBasisReport",
    "tangent_project",
    "tangent_project_general",
    "core_tangent_project",
    "core_tangent_basis",
    "tangent_to_ambient",
    "brute_force_projector",
    "apply_tangent_projector",
    "polar_align",
    "aligned_basis_report",
    "curvature_report",
    "operator_norm_power",
    "AMBIENT_LIMIT",
]

# dense-ambient computations (oracle, operator norms) are limited to this size
AMBIENT_LIMIT = 4096

_GRAM_COND_LIMIT = 1e14


@dataclass(frozen=True)
class TangentVector:
    """Gauge-normalized tangent components at a base point."""

    base: ManifoldPoint
    core_velocity: DenseTensor
    factor_velocities: tuple

    def norm(self) -> float:
        return tangent_to_ambient(self).norm()


def _check_ambient(dims):
    size = int(np.prod(dims))
    if size > AMBIENT_LIMIT:
        raise OversizeError(
            f"ambient size {size} exceeds the dense-computation limit {AMBIENT_LIMIT}"
        )
    return size


# ---------------------------------------------------------------------------
# core tangent space (tensor-train constraint)
# ---------------------------------------------------------------------------


def _tt_interface_bases(core: TTTensor):
    """Orthonormal prefix bases ``L_m`` and suffix bases ``R_m`` per interface.

    ``L_m`` has shape ``(prod(dims[:m+1]), k_m)`` and spans the columns of the
    prefix unfolding; ``R_m`` has shape ``(prod(dims[m+1:]), k_m)`` and spans
    its rows.  Row enumeration follows C order of the respective mode groups,
    matching plain ``reshape`` of a dense array.
    """
    d = core.ndim
    left = orthogonalize(core, d - 1)
    right = orthogonalize(core, 0)
    L = []
    acc = left.cores[0][0]  # (N_0, k_0)
    L.append(acc.copy())
    for m in range(1, d - 1):
        acc = np.tensordot(acc, left.cores[m], axes=(1, 0))
        acc = acc.reshape(-1, acc.shape[-1])
        L.append(acc.copy())
    R = [None] * (d - 1)
    acc = right.cores[d - 1][:, :, 0]  # (k_{d-2}, N_{d-1})
    if d >= 2:
        R[d - 2] = acc.T.copy()
    for m in range(d - 3, -1, -1):
        acc = np.tensordot(right.cores[m + 1], acc, axes=(2, 0))
        acc = acc.reshape(acc.shape[0], -1)
        R[m] = acc.T.copy()
    return L, R


def core_tangent_project(core, z: DenseTensor) -> DenseTensor:
    """Orthogonal projection onto the tangent space of the core constraint set.

    For a dense (plain Tucker) core the set is open and the projector is the
    identity.  For a train core the projector splits across interfaces; each
    summand sandwiches the prefix matricization of ``z`` between interface
    basis projectors.
    """
    if isinstance(core, DenseTensor):
        return z
    if not isinstance(core, TTTensor):
        raise InvalidArgumentError("core must be a TTTensor or DenseTensor")
    if z.dims != core.dims:
        raise InvalidArgumentError("argument does not match the core sizes")
    d = core.ndim
    if d == 1:
        return z
    from .tt import boundary_gap

    boundary_gap(core)  # raises DegeneratePointError on rank deficiency

    dims = core.dims
    L, R = _tt_interface_bases(core)
    zarr = z.to_array()
    out = np.zeros_like(zarr)
    for m in range(d - 1):
        pre = int(np.prod(dims[: m + 1]))
        mat = zarr.reshape(pre, -1)
        colproj = (mat @ R[m]) @ R[m].T
        if m == 0:
            rows_kept = colproj
        else:
            pre_prev = int(np.prod(dims[:m]))
            block = colproj.reshape(pre_prev, dims[m] * colproj.shape[1])
            rows_kept = (L[m - 1] @ (L[m - 1].T @ block)).reshape(pre, -1)
        term = rows_kept - L[m] @ (L[m].T @ colproj)
        out += term.reshape(zarr.shape)
    # final summand: prefix of the last interface on rows, identity on the last mode
    pre = int(np.prod(dims[:-1]))
    mat = zarr.reshape(pre, dims[-1])
    out += (L[d - 2] @ (L[d - 2].T @ mat)).reshape(zarr.shape)
    return DenseTensor.from_array(out)


def core_tangent_basis(core) -> np.ndarray:
    """Orthonormal basis of the core tangent space, one column per direction.

    Columns are column-major vectorizations.  For a dense core the basis is
    the identity; for a train core it is obtained by orthonormalizing the
    span of all single-core replacements.
    """
    if isinstance(core, DenseTensor):
        return np.eye(core.size)
    d = core.ndim
    size = int(np.prod(core.dims))
    if d == 1:
        return np.eye(size)
    cols = []
    for m in range(d):
        shape = core.cores[m].shape
        for idx in np.ndindex(shape):
            unit = np.zeros(shape)
            unit[idx] = 1.0
            cores = list(core.cores)
            cores[m] = unit
            cols.append(tt_to_dense(TTTensor(tuple(cores))).data)
    span = np.array(cols).T
    ranks = core.ranks
    dim = sum(c.size for c in core.cores) - sum(k * k for k in ranks)
    u, s, _ = np.linalg.svd(span, full_matrices=False)
    if s[dim - 1] <= 1e-10 * s[0]:
        raise DegeneratePointError("core tangent spanning set is rank deficient")
    return u[:, :dim]


# ---------------------------------------------------------------------------
# full tangent projector
# ---------------------------------------------------------------------------


def _compress_modes(z: DenseTensor, factors, skip=None) -> DenseTensor:
    out = z
    for m, u in enumerate(factors):
        if m == skip:
            continue
        out = mode_multiply(out, u.T, m)
    return out


def tangent_project(p: ManifoldPoint, z: DenseTensor) -> TangentVector:
    """Orthogonal projection of ``z`` onto the tangent space at ``p``.

    Requires orthonormal factors; use :func:`tangent_project_general` for the
    metric-adjusted variant.  The ambient embedding of the result is the
    orthogonal projection of ``z`` and the components satisfy the gauge
    conditions.
    """
    if not p.orthonormal_factors:
        raise InvalidArgumentError(
            "point has non-orthonormal factors; use tangent_project_general"
        )
    if z.dims != p.dims:
        raise InvalidArgumentError("argument does not match the point sizes")
    core = p.core_dense()
    cz = _compress_modes(z, p.factors)
    cdot = core_tangent_project(p.core, cz)
    velocities = []
    for m, u in enumerate(p.factors):
        n, r = u.shape
        zm = matricize(_compress_modes(z, p.factors, skip=m), {m})
        mc = matricize(core, {m})
        gram_rows = mc @ mc.T
        raw = zm @ mc.T
        udot = raw - u @ (u.T @ raw)
        udot = np.linalg.solve(gram_rows, udot.T).T
        velocities.append(udot)
    return TangentVector(base=p, core_velocity=cdot, factor_velocities=tuple(velocities))


def tangent_project_general(p: ManifoldPoint, z: DenseTensor) -> TangentVector:
    """Tangent projection for points with merely independent factor columns.

    The per-mode pieces only depend on the spanned subspaces.  The core piece
    is the projection of the representation coefficients of ``z`` onto the
    core tangent space, orthogonal with respect to the metric induced by the
    factor Gramians; it is computed by a dense solve on an explicit core
    tangent basis.  Agrees with :func:`tangent_project` for orthonormal
    factors.
    """
    if z.dims != p.dims:
        raise InvalidArgumentError("argument does not match the point sizes")
    grams = [u.T @ u for u in p.factors]
    for m, g in enumerate(grams):
        ev = np.linalg.eigvalsh(g)
        if ev[0] <= 0 or ev[-1] / ev[0] >= _GRAM_COND_LIMIT:
            raise IllConditionedPointError(
                f"factor {m} Gramian condition exceeds {_GRAM_COND_LIMIT:.0e}"
            )
    core = p.core_dense()
    # coefficients of z in the (possibly oblique) representation basis
    pinvs = [np.linalg.solve(g, u.T) for g, u in zip(grams, p.factors)]
    cz = z
    for m, pi in enumerate(pinvs):
        cz = mode_multiply(cz, pi, m)

    # metric-orthogonal projection of the coefficients onto the core tangent space
    basis = core_tangent_basis(p.core)
    rdims = core.dims

    def metric_apply(vec):
        t = DenseTensor(rdims, vec)
        for m, g in enumerate(grams):
            t = mode_multiply(t, g, m)
        return t.data

    a_basis = np.column_stack([metric_apply(basis[:, j]) for j in range(basis.shape[1])])
    small = basis.T @ a_basis
    rhs = basis.T @ metric_apply(cz.data)
    gamma = np.linalg.solve(small, rhs)
    cdot = DenseTensor(rdims, basis @ gamma)

    velocities = []
    for m, u in enumerate(p.factors):
        q, _ = np.linalg.qr(u)
        # the per-mode piece only depends on the spanned subspaces: project the
        # matricization onto the covector span and split off the span of u
        zm = matricize(_compress_modes(z, p.factors, skip=m), {m})
        mc = matricize(core, {m})
        gram_w = _gram_kron(grams, skip=m, mc=mc)
        raw = zm @ mc.T
        udot = raw - q @ (q.T @ raw)
        udot = np.linalg.solve(gram_w, udot.T).T
        velocities.append(udot)
    return TangentVector(base=p, core_velocity=cdot, factor_velocities=tuple(velocities))


def _gram_kron(grams, skip, mc):
    """Gramian of the mode-``skip`` covectors: ``M_C (kron of other Gramians) M_C^T``."""
    r = mc.shape[0]
    rdims = [g.shape[0] for g in grams]
    other = [rdims[m] for m in range(len(grams)) if m != skip]
    out = np.zeros((r, r))
    for i in range(r):
        row = DenseTensor(tuple(other), mc[i])
        for j, m in enumerate([m for m in range(len(grams)) if m != skip]):
            row = mode_multiply(row, grams[m], j)
        out[i] = mc @ row.data
    return out


def tangent_to_ambient(v: TangentVector) -> DenseTensor:
    """Embed the components into the ambient space.

    The d+1 summands are mutually orthogonal, so the squared norm of the
    embedding is the sum of the squared summand norms.
    """
    p = v.base
    core = p.core_dense()
    out = v.core_velocity
    for m, u in enumerate(p.factors):
        out = mode_multiply(out, u, m)
    for m, udot in enumerate(v.factor_velocities):
        term = core
        for mm, u in enumerate(p.factors):
            term = mode_multiply(term, udot if mm == m else u, mm)
        out = out + term
    return out


def apply_tangent_projector(p: ManifoldPoint, z: DenseTensor) -> DenseTensor:
    """Ambient-to-ambient action of the tangent projector at ``p``."""
    return tangent_to_ambient(tangent_project(p, z))


def brute_force_projector(p: ManifoldPoint, z: DenseTensor) -> DenseTensor:
    """Independent oracle: orthonormalize an explicit tangent spanning set.

    Assembles ambient vectors from all admissible parameter perturbations
    (single-core replacements of the train core, unit factor perturbations),
    orthonormalizes them by SVD, and projects ``z`` onto their span.  Only
    available at dense-ambient desk scale.
    """
    size = _check_ambient(p.dims)
    if z.dims != p.dims:
        raise InvalidArgumentError("argument does not match the point sizes")
    cols = []
    core = p.core_dense()
    if p.tt_core and p.core.ndim > 1:
        for m in range(p.core.ndim):
            shape = p.core.cores[m].shape
            for idx in np.ndindex(shape):
                unit = np.zeros(shape)
                unit[idx] = 1.0
                cores = list(p.core.cores)
                cores[m] = unit
                cdir = tt_to_dense(TTTensor(tuple(cores)))
                vec = cdir
                for mm, u in enumerate(p.factors):
                    vec = mode_multiply(vec, u, mm)
                cols.append(vec.data)
    else:
        for j in range(core.size):
            cdir = DenseTensor(core.dims, np.eye(core.size)[:, j])
            vec = cdir
            for mm, u in enumerate(p.factors):
                vec = mode_multiply(vec, u, mm)
            cols.append(vec.data)
    for m, u in enumerate(p.factors):
        n, r = u.shape
        for i in range(n):
            for a in range(r):
                e = np.zeros((n, r))
                e[i, a] = 1.0
                term = core
                for mm, uu in enumerate(p.factors):
                    term = mode_multiply(term, e if mm == m else uu, mm)
                cols.append(term.data)
    span = np.array(cols).T
    q_core = (
        core_tangent_basis(p.core).shape[1] if p.tt_core else core.size
    )
    dim = q_core + sum((u.shape[0] - u.shape[1]) * u.shape[1] for u in p.factors)
    u, s, _ = np.linalg.svd(span, full_matrices=False)
    if s[dim - 1] <= 1e-10 * s[0]:
        raise DegeneratePointError("tangent spanning set is rank deficient")
    basis = u[:, :dim]
    return DenseTensor(p.dims, basis @ (basis.T @ z.data))


# ---------------------------------------------------------------------------
# orthonormal tangent coordinates
# ---------------------------------------------------------------------------


class TangentBasis:
    """Orthonormal coordinates on the tangent space at a fixed point.

    The coordinate map is an isometry: the Euclidean norm of a coordinate
    vector equals the ambient norm of the tangent vector it encodes.  Layout:
    first the core block, then one gauge block per mode stored column-major.
    """

    def __init__(self, p: ManifoldPoint):
        if not p.orthonormal_factors:
            raise InvalidArgumentError("tangent coordinates require orthonormal factors")
        self.point = p
        self.core_basis = core_tangent_basis(p.core)
        core = p.core_dense()
        self._core = core
        self.qperp = []
        self.rmap = []  # U-dot reconstruction map: P diag(1/sigma)
        self.qright = []  # orthonormal covector coefficients per mode
        for m, u in enumerate(p.factors):
            n, r = u.shape
            full, _ = np.linalg.qr(u, mode="complete")
            self.qperp.append(full[:, r:])
            mc = matricize(core, {m})
            pw, sw, qwt = np.linalg.svd(mc, full_matrices=False)
            if sw[-1] <= 1e-13 * sw[0]:
                raise DegeneratePointError("core loses full multilinear rank")
            self.rmap.append(pw / sw)
            self.qright.append(qwt.T)
        self.block_sizes = [self.core_basis.shape[1]] + [
            q.shape[1] * u.shape[1] for q, u in zip(self.qperp, p.factors)
        ]
        self.dim = int(sum(self.block_sizes))

    def _blocks(self, coords):
        out = []
        start = 0
        for size in self.block_sizes:
            out.append(coords[start : start + size])
            start += size
        return out

    def to_tangent(self, coords) -> TangentVector:
        coords = np.asarray(coords, dtype=float)
        blocks = self._blocks(coords)
        cdot = DenseTensor(self._core.dims, self.core_basis @ blocks[0])
        vels = []
        for m, u in enumerate(self.point.factors):
            n, r = u.shape
            theta = blocks[m + 1].reshape(n - r, r, order="F")
            vels.append(self.qperp[m] @ theta @ self.rmap[m].T)
        return TangentVector(self.point, cdot, tuple(vels))

    def from_tangent(self, v: TangentVector) -> np.ndarray:
        parts = [self.core_basis.T @ v.core_velocity.data]
        for m, u in enumerate(self.point.factors):
            mc = matricize(self._core, {m})
            theta = self.qperp[m].T @ v.factor_velocities[m] @ (mc @ self.qright[m])
            parts.append(theta.ravel(order="F"))
        return np.concatenate(parts)

    def project_coords(self, z: DenseTensor) -> np.ndarray:
        """Coordinates of the tangent projection of an ambient tensor."""
        p = self.point
        cz = _compress_modes(z, p.factors)
        parts = [self.core_basis.T @ cz.data]
        for m in range(p.ndim):
            zm = matricize(_compress_modes(z, p.factors, skip=m), {m})
            theta = self.qperp[m].T @ zm @ self.qright[m]
            parts.append(theta.ravel(order="F"))
        return np.concatenate(parts)

    def ambient_matrix(self) -> np.ndarray:
        """Dense ambient basis matrix, one orthonormal column per coordinate."""
        size = _check_ambient(self.point.dims)
        cols = np.zeros((size, self.dim))
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = 1.0
            cols[:, j] = tangent_to_ambient(self.to_tangent(e)).data
        return cols


# ---------------------------------------------------------------------------
# alignment and curvature diagnostics
# ---------------------------------------------------------------------------


def polar_align(u, u_tilde) -> np.ndarray:
    """Rotate the basis ``u`` so that ``u^T u_tilde`` is symmetric PSD.

    The rotation is the orthogonal polar factor of ``u^T u_tilde``; zero
    singular values are mapped through the SVD factors, which keeps the
    returned basis orthonormal and the spanned subspace unchanged.
    """
    u = np.asarray(u, dtype=float)
    u_tilde = np.asarray(u_tilde, dtype=float)
    if u.shape != u_tilde.shape:
        raise InvalidArgumentError("bases must have equal shapes")
    w, _, zt = np.linalg.svd(u.T @ u_tilde)
    return u @ (w @ zt)


@dataclass(frozen=True)
class AlignedBasisReport:
    """Both sides of the sqrt(2) comparison inequalities for aligned bases."""

    basis_diff: float
    projector_diff: float
    coeff_diff: float
    embedded_diff: float
    basis_bound_ok: bool
    coeff_bound_ok: bool


def aligned_basis_report(u, v, x, y, tol=1e-10) -> AlignedBasisReport:
    """Check ``|U-V| <= sqrt(2) |P_U - P_V|`` and ``|x-y| <= sqrt(2) |Ux - Vy|``.

    Requires orthonormal ``u``, ``v`` with ``u^T v`` symmetric positive
    semidefinite (use :func:`polar_align` first).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    r = u.shape[1]
    for name, b in (("u", u), ("v", v)):
        if not np.allclose(b.T @ b, np.eye(r), atol=1e-10):
            raise InvalidArgumentError(f"basis {name} is not orthonormal")
    m = u.T @ v
    if not np.allclose(m, m.T, atol=1e-8):
        raise InvalidArgumentError("bases are not aligned: u^T v is not symmetric")
    if np.linalg.eigvalsh(0.5 * (m + m.T))[0] < -1e-10:
        raise InvalidArgumentError("bases are not aligned: u^T v is not PSD")
    basis_diff = float(np.linalg.norm(u - v, 2))
    projector_diff = float(np.linalg.norm(u @ u.T - v @ v.T, 2))
    coeff_diff = float(np.linalg.norm(x - y))
    embedded_diff = float(np.linalg.norm(u @ x - v @ y))
    return AlignedBasisReport(
        basis_diff=basis_diff,
        projector_diff=projector_diff,
        coeff_diff=coeff_diff,
        embedded_diff=embedded_diff,
        basis_bound_ok=basis_diff <= np.sqrt(2) * projector_diff + tol,
        coeff_bound_ok=coeff_diff <= np.sqrt(2) * embedded_diff + tol,
    )


def operator_norm_power(apply, size, rng=None, tol=1e-8, maxit=500):
    """Spectral norm of a symmetric ambient operator by power iteration.

    Iterates on the squared operator so eigenvalue sign pairs cannot stall
    the iteration; stops at relative tolerance ``tol`` or after ``maxit``
    applications of the squared operator.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    v = rng.standard_normal(size)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(maxit):
        w = apply(v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        new_est = nw
        w = apply(w / nw)
        nw2 = np.linalg.norm(w)
        if nw2 == 0.0:
            return float(new_est)
        v = w / nw2
        new_est = np.sqrt(new_est * nw2)
        if abs(new_est - est) <= tol * max(new_est, 1e-300):
            return float(new_est)
        est = new_est
    return float(est)


@dataclass(frozen=True)
class CurvatureReport:
    """Observed projector difference and normal defect with theoretical bounds.

    ``sigma_kind`` is ``"exact-matrix-distance"`` for matrices, where the
    smallest positive singular value is the true distance to the relative
    boundary, and ``"interface-gap-heuristic"`` otherwise, where the
    interface gap only bounds that distance from above and the bound columns
    are diagnostics rather than theorems.
    """

    ndim: int
    distance: float
    projector_difference_norm: float
    normal_defect: float
    projector_bound_outer: float
    normal_bound_outer: float
    projector_bound_tt: float
    normal_bound_tt: float
    sigma_used: float
    sigma_kind: str

    def to_json_dict(self) -> dict:
        return {
            "ndim": self.ndim,
            "distance": self.distance,
            "projector_difference_norm": self.projector_difference_norm,
            "normal_defect": self.normal_defect,
            "projector_bound_outer": self.projector_bound_outer,
            "normal_bound_outer": self.normal_bound_outer,
            "projector_bound_tt": self.projector_bound_tt,
            "normal_bound_tt": self.normal_bound_tt,
            "sigma_used": self.sigma_used,
            "sigma_kind": self.sigma_kind,
        }


def curvature_report(x: ManifoldPoint, y: ManifoldPoint, rng=None) -> CurvatureReport:
    """Compare two points' tangent projectors against the curvature bounds.

    The projector difference norm is computed matrix-free by power iteration
    on the dense ambient action (desk scale only).
    """
    if x.dims != y.dims or x.outer_ranks != y.outer_ranks:
        raise InvalidArgumentError("points live on different manifolds")
    size = _check_ambient(x.dims)
    xd = point_to_dense(x)
    yd = point_to_dense(y)
    diff = xd - yd
    dist = diff.norm()

    # matrix-free action of P_X - P_Y through the orthonormal tangent bases
    bx = TangentBasis(x).ambient_matrix()
    by = TangentBasis(y).ambient_matrix()

    def apply(vec):
        return bx @ (bx.T @ vec) - by @ (by.T @ vec)

    proj_norm = operator_norm_power(apply, size, rng=rng)
    defect = (diff - apply_tangent_projector(x, diff)).norm()

    d = x.ndim
    if d == 2:
        # for matrices the smallest positive singular value is the exact distance
        s = np.linalg.svd(matricize(xd, {0}), compute_uv=False)
        sigma = float(s[x.outer_ranks[0] - 1])
        kind = "exact-matrix-distance"
    else:
        sigma = point_boundary_gap(x)
        kind = "interface-gap-heuristic"
    return CurvatureReport(
        ndim=d,
        distance=dist,
        projector_difference_norm=proj_norm,
        normal_defect=defect,
        projector_bound_outer=2 * d * (3 * np.sqrt(2) + 1) / sigma * dist,
        normal_bound_outer=np.sqrt(2 * d - 1) / sigma * dist**2,
        projector_bound_tt=4 * d / sigma * dist,
        normal_bound_tt=np.sqrt(d - 1) / sigma * dist**2,
        sigma_used=sigma,
        sigma_kind=kind,
    )
