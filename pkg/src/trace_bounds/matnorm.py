"""Norms of symmetric matrices and their exact equivalence constants.

Conventions for an n x n symmetric matrix T (n in {2, 3}):

* operator norms: op1 = opInf = max row absolute sum; op2 = spectral radius
  max_i |lambda_i|;
* vector p-norms treat T entrywise over all n^2 ordered index pairs, so
  off-diagonal entries count twice and vec2 equals the Frobenius norm;
* dual_op2 = sum_i |lambda_i| (the dual of the spectral radius norm).

Eigenvalues come from a cyclic Jacobi iteration (vectorized over stacks of
matrices); the 2x2 quadratic formula and numpy's eigensolver serve as
independent oracles in the test suite only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NORM_KINDS",
    "NormEquivalenceError",
    "eigenvalues",
    "eigenvalues_stack",
    "norm",
    "norm_stack",
    "EquivalenceRow",
    "verify_equivalence_constants",
    "equivalence_table_csv",
]

NORM_KINDS = ("op1", "op2", "opInf", "vec1", "vec2", "vecInf", "dual_op2")

_JACOBI_SWEEPS = 30
_OFFDIAG_TOL = 1e-13


class NormEquivalenceError(AssertionError):
    pass


def _check_sym(T: np.ndarray) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    if T.ndim == 2:
        T = T[None]
    if T.ndim != 3 or T.shape[1] != T.shape[2] or T.shape[1] not in (2, 3):
        raise ValueError("expected (m, n, n) symmetric matrices with n in {2, 3}")
    if not np.allclose(T, np.swapaxes(T, 1, 2), atol=1e-12 * max(1.0, np.abs(T).max())):
        raise ValueError("matrix is not symmetric")
    return 0.5 * (T + np.swapaxes(T, 1, 2))


def eigenvalues_stack(T: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a stack of symmetric matrices, cyclic Jacobi."""
    A = _check_sym(T).copy()
    m, n, _ = A.shape
    fro = np.sqrt((A * A).sum(axis=(1, 2)))
    tol = _OFFDIAG_TOL * np.maximum(fro, 1e-300)
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]
    for _ in range(_JACOBI_SWEEPS):
        off = np.sqrt(2.0 * sum(A[:, p, q] ** 2 for p, q in pairs))
        if (off <= tol).all():
            break
        for p, q in pairs:
            apq = A[:, p, q]
            rotate = np.abs(apq) > 1e-300
            if not rotate.any():
                continue
            app = A[:, p, p]
            aqq = A[:, q, q]
            # stable Jacobi rotation angle; for huge tau use the series limit
            tau = np.where(rotate, (aqq - app) / (2.0 * np.where(rotate, apq, 1.0)), 0.0)
            big = np.abs(tau) > 1e150
            tau_safe = np.where(big, 1.0, tau)
            t = np.sign(tau_safe) / (np.abs(tau_safe) + np.sqrt(1.0 + tau_safe ** 2))
            t = np.where(big, 0.5 / np.where(big, tau, 1.0), t)
            t = np.where(tau == 0.0, 1.0, t)
            t = np.where(rotate, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rowp = A[:, p, :].copy()
            rowq = A[:, q, :].copy()
            A[:, p, :] = c[:, None] * rowp - s[:, None] * rowq
            A[:, q, :] = s[:, None] * rowp + c[:, None] * rowq
            colp = A[:, :, p].copy()
            colq = A[:, :, q].copy()
            A[:, :, p] = c[:, None] * colp - s[:, None] * colq
            A[:, :, q] = s[:, None] * colp + c[:, None] * colq
            A[:, p, q] = 0.0
            A[:, q, p] = 0.0
    eigs = np.einsum("mii->mi", A)
    return np.sort(eigs, axis=1)


def eigenvalues(T: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of one symmetric matrix."""
    return eigenvalues_stack(np.asarray(T, dtype=float)[None])[0]


def norm_stack(T: np.ndarray, kind: str) -> np.ndarray:
    """One norm value per matrix in the stack."""
    A = _check_sym(T)
    if kind in ("op1", "opInf"):
        return np.abs(A).sum(axis=2).max(axis=1)
    if kind == "op2":
        return np.abs(eigenvalues_stack(A)).max(axis=1)
    if kind == "vec1":
        return np.abs(A).sum(axis=(1, 2))
    if kind == "vec2":
        return np.sqrt((A * A).sum(axis=(1, 2)))
    if kind == "vecInf":
        return np.abs(A).max(axis=(1, 2))
    if kind == "dual_op2":
        return np.abs(eigenvalues_stack(A)).sum(axis=1)
    raise ValueError(f"unknown norm kind {kind!r}")


def norm(T: np.ndarray, kind: str) -> float:
    return float(norm_stack(np.asarray(T, dtype=float)[None], kind)[0])


# ---------------------------------------------------------------------------
# equivalence constants (five exact two-sided bounds)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceRow:
    ratio: str              # e.g. "op2/op1"
    lower: float
    upper: float
    observed_min: float
    observed_max: float


def _bounds(n: int) -> list[tuple[str, str, float, float]]:
    rn = float(np.sqrt(n))
    return [
        ("op2", "op1", 1.0 / rn, rn),
        ("vec2", "op2", 1.0, rn),
        ("op2", "vecInf", 1.0, float(n)),
        ("dual_op2", "op2", 1.0, float(n)),
        ("dual_op2", "vec2", 1.0, rn),
    ]


def _structured_seeds(n: int, rng: np.random.Generator) -> np.ndarray:
    mats = [np.eye(n)]
    for i in range(n):
        for j in range(i, n):
            m = np.zeros((n, n))
            m[i, j] = m[j, i] = 1.0
            mats.append(m)
    for k in range(n):
        e = np.eye(n)[k]
        mats.append(np.outer(e, e))
    for _ in range(4):
        v = rng.normal(size=n)
        v /= np.linalg.norm(v)
        mats.append(np.outer(v, v))
    ones = np.full((n, n), 1.0)
    mats.append(ones)
    return np.stack(mats)


def verify_equivalence_constants(n: int, sample_count: int,
                                 seed: int = 20240401) -> list[EquivalenceRow]:
    """Check the five exact norm-equivalence bounds on sampled matrices.

    Samples ``sample_count`` random symmetric matrices (entries uniform in
    [-1, 1]) plus structured seeds, and asserts every ratio lies inside its
    exact interval. Raises NormEquivalenceError naming the first offending
    matrix; returns the observed extreme ratios per pair.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    upper = rng.uniform(-1.0, 1.0, size=(sample_count, n, n))
    iu = np.triu_indices(n)
    mats = np.zeros_like(upper)
    for m in range(sample_count):
        mats[m][iu] = upper[m][iu]
    mats = mats + np.swapaxes(mats, 1, 2) - np.eye(n) * np.einsum("mii->mi", mats)[:, :, None]
    mats = np.concatenate([_structured_seeds(n, rng), mats])

    norms = {kind: norm_stack(mats, kind) for kind in
             ("op1", "op2", "vec2", "vecInf", "dual_op2")}
    rows = []
    slack = 1e-12
    for num, den, lower_bound, upper_bound in _bounds(n):
        d = norms[den]
        valid = d > 1e-300
        ratio = norms[num][valid] / d[valid]
        bad_low = ratio < lower_bound * (1.0 - slack) - slack
        bad_high = ratio > upper_bound * (1.0 + slack) + slack
        if bad_low.any() or bad_high.any():
            which = np.flatnonzero(valid)[np.flatnonzero(bad_low | bad_high)[0]]
            raise NormEquivalenceError(
                f"{num}/{den} = {float(norms[num][which] / norms[den][which]):.15g} "
                f"outside [{lower_bound:.15g}, {upper_bound:.15g}] for matrix "
                f"{mats[which].tolist()}")
        rows.append(EquivalenceRow(
            ratio=f"{num}/{den}",
            lower=lower_bound,
            upper=upper_bound,
            observed_min=float(ratio.min()),
            observed_max=float(ratio.max()),
        ))
    return rows


def equivalence_table_csv(rows: list[EquivalenceRow], path) -> None:
    with open(path, "w") as fh:
        fh.write("ratio,exact_lower,exact_upper,observed_min,observed_max\n")
        for r in rows:
            fh.write(f"{r.ratio},{r.lower!r},{r.upper!r},"
                     f"{r.observed_min!r},{r.observed_max!r}\n")
