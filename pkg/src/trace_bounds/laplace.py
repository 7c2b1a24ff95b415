"""Embedded-boundary Laplace solver and difference operators.

Dirichlet problems are discretized with Shortley-Weller stencils: stencil
arms that would leave the domain are clipped at the level-set zero crossing
and read the boundary value there. The resulting system is an M-matrix, so
the discrete maximum principle holds; every solve verifies it, along with
the algebraic residual, and records both in ``solver_stats``.

The linear system is solved by a sparse direct factorization, computed once
per domain and reused by every component solve on that domain (the matrix
depends only on the geometry). Residuals are verified against the 1e-10
relative tolerance after every solve.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fields import ScalarField, SymTensorField, VectorField
from .geometry import Domain, GeometryError

__all__ = [
    "SolverError",
    "solve_dirichlet",
    "gradient",
    "divergence",
    "laplacian",
    "sup_norm",
    "extrapolate_to_boundary",
    "solver_stats",
    "reset_solver_stats",
]

SOLVER_TOL = 1e-10
# slack for the discrete maximum principle check (algebraic, not O(h))
_MAX_PRINCIPLE_TOL = 1e-8

solver_stats = {"solves": 0, "max_residual": 0.0, "max_principle_violation": 0.0}


def reset_solver_stats() -> None:
    solver_stats["solves"] = 0
    solver_stats["max_residual"] = 0.0
    solver_stats["max_principle_violation"] = 0.0


class SolverError(RuntimeError):
    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class _Operator:
    """Shortley-Weller discretization bound to one domain."""

    def __init__(self, domain: Domain):
        self.domain = domain
        n = domain.n_interior
        dim = domain.dim
        rows, cols, vals = [], [], []
        brows, bcols, bvals = [], [], []
        diag = np.zeros(n)
        idx = np.arange(n)
        for ax in range(dim):
            hp = domain.arm_length[2 * ax]
            hm = domain.arm_length[2 * ax + 1]
            cp = 2.0 / (hp * (hp + hm))
            cm = 2.0 / (hm * (hp + hm))
            diag += 2.0 / (hp * hm)
            for d, coeff in ((2 * ax, cp), (2 * ax + 1, cm)):
                nb_int = domain.arm_interior[d]
                nb_bnd = domain.arm_boundary[d]
                m = nb_int >= 0
                rows.append(idx[m])
                cols.append(nb_int[m])
                vals.append(-coeff[m])
                m = nb_bnd >= 0
                brows.append(idx[m])
                bcols.append(nb_bnd[m])
                bvals.append(coeff[m])
        rows.append(idx)
        cols.append(idx)
        vals.append(diag)
        self.neg_laplacian = sp.csc_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n))
        self.boundary_coupling = sp.csc_matrix(
            (np.concatenate(bvals), (np.concatenate(brows), np.concatenate(bcols))),
            shape=(n, domain.n_boundary))
        self._lu = None

    @property
    def lu(self):
        if self._lu is None:
            try:
                self._lu = spla.splu(self.neg_laplacian)
            except RuntimeError as exc:
                raise SolverError(f"sparse factorization failed: {exc}") from exc
        return self._lu

    def apply_laplacian(self, field: ScalarField) -> np.ndarray:
        """Discrete Laplacian at interior nodes, using the field's boundary values."""
        return (self.boundary_coupling @ field.boundary
                - self.neg_laplacian @ field.interior)

    def solve(self, boundary_values: np.ndarray) -> ScalarField:
        domain = self.domain
        g = np.asarray(boundary_values, dtype=float)
        if g.shape != (domain.n_boundary,):
            raise GeometryError(
                f"expected {domain.n_boundary} boundary values, got {g.shape}")
        if not np.isfinite(g).all():
            raise GeometryError("boundary data contains non-finite values")
        rhs = self.boundary_coupling @ g
        u = self.lu.solve(rhs)
        scale = max(np.abs(rhs).max(), np.abs(u).max(), 1e-300)
        residual = np.abs(self.neg_laplacian @ u - rhs).max() / scale
        if not np.isfinite(u).all() or residual > SOLVER_TOL:
            raise SolverError(
                f"linear solve residual {residual:.3e} exceeds {SOLVER_TOL:.0e}",
                residual=residual)
        # discrete maximum principle: interior values stay inside the data range
        constrained = g[domain.boundary_is_axis]
        gscale = max(np.abs(constrained).max(), 1e-300) if constrained.size else 1e-300
        violation = 0.0
        if u.size and constrained.size:
            violation = max(u.max() - constrained.max(), constrained.min() - u.min())
            violation = max(0.0, violation / gscale)
        solver_stats["solves"] += 1
        solver_stats["max_residual"] = max(solver_stats["max_residual"], residual)
        solver_stats["max_principle_violation"] = max(
            solver_stats["max_principle_violation"], violation)
        if violation > _MAX_PRINCIPLE_TOL:
            raise SolverError(
                f"discrete maximum principle violated by {violation:.3e}")
        return ScalarField(domain, u, g)


def _operator(domain: Domain) -> _Operator:
    op = domain._cache.get("laplace_operator")
    if op is None:
        op = _Operator(domain)
        domain._cache["laplace_operator"] = op
    return op


def solve_dirichlet(domain: Domain, boundary_values) -> ScalarField:
    """Solve lap(u)=0 with u = boundary_values on the boundary nodes."""
    return _operator(domain).solve(np.asarray(boundary_values, dtype=float))


# ---------------------------------------------------------------------------
# difference operators
# ---------------------------------------------------------------------------

def _arm_values(field: ScalarField, direction: int) -> np.ndarray:
    """Field value at the far end of each stencil arm."""
    domain = field.domain
    nb_int = domain.arm_interior[direction]
    nb_bnd = domain.arm_boundary[direction]
    out = np.empty(domain.n_interior)
    m = nb_int >= 0
    out[m] = field.interior[nb_int[m]]
    out[~m] = field.boundary[nb_bnd[~m]]
    return out


def _derivative_interior(field: ScalarField, axis: int) -> np.ndarray:
    """Second-order non-uniform 3-point first derivative along one axis."""
    domain = field.domain
    hp = domain.arm_length[2 * axis]
    hm = domain.arm_length[2 * axis + 1]
    vp = _arm_values(field, 2 * axis)
    vm = _arm_values(field, 2 * axis + 1)
    return (hm ** 2 * vp - hp ** 2 * vm + (hp ** 2 - hm ** 2) * field.interior) \
        / (hp * hm * (hp + hm))


def _interior_only_gradient(domain: Domain, values: np.ndarray) -> np.ndarray:
    """(N, dim) gradient using interior neighbors only (for extrapolation)."""
    grad = np.zeros((domain.n_interior, domain.dim))
    h = domain.h
    for ax in range(domain.dim):
        ip = domain.arm_interior[2 * ax]
        im = domain.arm_interior[2 * ax + 1]
        has_p = ip >= 0
        has_m = im >= 0
        vp = np.where(has_p, values[np.where(has_p, ip, 0)], 0.0)
        vm = np.where(has_m, values[np.where(has_m, im, 0)], 0.0)
        both = has_p & has_m
        grad[both, ax] = (vp[both] - vm[both]) / (2 * h)
        only_p = has_p & ~has_m
        grad[only_p, ax] = (vp[only_p] - values[only_p]) / h
        only_m = has_m & ~has_p
        grad[only_m, ax] = (values[only_m] - vm[only_m]) / h
    return grad


def extrapolate_to_boundary(domain: Domain, interior_values: np.ndarray) -> np.ndarray:
    """Linear extrapolation of an interior nodal field onto the boundary nodes.

    Each boundary node takes the value at its nearest interior node plus a
    first-order correction from that node's interior-only gradient: the
    outward continuation used to evaluate derived quantities (divergences)
    on the boundary itself.
    """
    interior_values = np.asarray(interior_values, dtype=float)
    grad = _interior_only_gradient(domain, interior_values)
    near = domain.boundary_nearest
    offset = domain.boundary_pos - domain.interior_coords[near]
    return interior_values[near] + np.sum(grad[near] * offset, axis=1)


def gradient(field: ScalarField) -> VectorField:
    """Componentwise first derivatives; boundary values linearly extrapolated."""
    domain = field.domain
    comps = []
    for ax in range(domain.dim):
        vals = _derivative_interior(field, ax)
        comps.append(ScalarField(domain, vals, extrapolate_to_boundary(domain, vals)))
    return VectorField(tuple(comps))


def divergence(field: VectorField) -> ScalarField:
    """Sum of the componentwise derivatives d(component_i)/dx_i."""
    domain = field.domain
    vals = np.zeros(domain.n_interior)
    for ax in range(domain.dim):
        vals += _derivative_interior(field.components[ax], ax)
    return ScalarField(domain, vals, extrapolate_to_boundary(domain, vals))


def tensor_divergence(field: SymTensorField) -> VectorField:
    """Row divergence (div sigma)_i = d sigma_ij / dx_j of a symmetric tensor."""
    domain = field.domain
    comps = []
    for i in range(field.dim):
        vals = np.zeros(domain.n_interior)
        for j in range(field.dim):
            vals += _derivative_interior(field.component(i, j), j)
        comps.append(ScalarField(domain, vals, extrapolate_to_boundary(domain, vals)))
    return VectorField(tuple(comps))


def laplacian(field: ScalarField) -> np.ndarray:
    """Discrete Shortley-Weller Laplacian at the interior nodes."""
    return _operator(field.domain).apply_laplacian(field)


def sup_norm(field: ScalarField, region: str = "closure") -> float:
    """Max of |values| over the requested node set."""
    if region == "interior":
        values = field.interior
    elif region == "boundary":
        values = field.boundary
    elif region == "closure":
        values = np.concatenate([field.interior, field.boundary])
    else:
        raise ValueError(f"unknown region {region!r}")
    if values.size == 0:
        raise ValueError(f"region {region!r} is empty")
    return float(np.abs(values).max())
