"""Weighted least squares on sparse designs with exact standard errors.

The solver forms the weighted normal equations A'WA c = A'Wy (A is the
sparse design plus an implicit intercept column), factors them with a dense
Cholesky, and reads per-coefficient standard errors off the diagonal of
sigma2 * (A'WA)^-1. Problem sizes here (hundreds of thousands of rows, a
couple thousand columns) make the dense normal-matrix route both the
fastest and the simplest way to get exact SE diagonals.

Centering constraints recorded on the design (sum of a column group = 0)
are enforced by reparametrizing on an orthonormal basis of the constraint
null space; unconstrained fits skip that entirely.

A numerically singular normal matrix (perfect collinearity, e.g. two
players always deployed together) either raises CollinearityError naming
an involved column pair or, under the "ridge" policy, adds a small jitter
to the diagonal and flags the fit. The jitter is a degeneracy guard, not
regularization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .design import DesignMatrix

# Relative Cholesky pivot below this is treated as a rank deficiency.
PIVOT_RTOL = 1e-10


class SizingError(ValueError):
    """Too few rows for the number of columns."""


class CollinearityError(ValueError):
    """Perfectly collinear columns under the "error" policy."""

    def __init__(self, column_keys: tuple[str, ...]):
        self.column_keys = column_keys
        super().__init__(
            "design is numerically singular; involved columns: "
            + ", ".join(column_keys)
        )


@dataclass(frozen=True)
class FitDiagnostics:
    ridge_applied: bool = False
    ridge_lambda: float = 0.0
    constraints_applied: tuple[str, ...] = ()
    min_rel_pivot: float = float("nan")
    condition_warning: bool = False


@dataclass
class FitResult:
    """Coefficients (goals/60), per-coefficient standard errors, weighted
    residual variance and degrees of freedom for one model fit."""

    coefficients: np.ndarray
    intercept: float
    std_errors: np.ndarray
    intercept_se: float
    sigma2: float
    dof: int
    column_map: object
    diagnostics: FitDiagnostics = field(default_factory=FitDiagnostics)

    def coef(self, key: str) -> float:
        return float(self.coefficients[self.column_map.index_of(key)])

    def se(self, key: str) -> float:
        return float(self.std_errors[self.column_map.index_of(key)])


def _constraint_basis(design: DesignMatrix, p: int) -> np.ndarray | None:
    """Orthonormal basis of the subspace satisfying all centering constraints.

    Columns are ordered [design columns..., intercept]; constraints never
    involve the intercept.
    """
    if not design.constraints:
        return None
    c_matrix = np.zeros((len(design.constraints), p))
    for row, (_, cols) in enumerate(design.constraints):
        c_matrix[row, list(cols)] = 1.0
    return scipy.linalg.null_space(c_matrix)


def _cholesky_with_pivot_check(a: np.ndarray):
    """Lower Cholesky factor and the smallest relative pivot, or None if
    the factorization fails outright."""
    diag = np.diag(a).copy()
    if np.any(diag <= 0):
        return None, 0.0
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return None, 0.0
    rel_pivots = np.diag(lower) ** 2 / diag
    return lower, float(rel_pivots.min())


def _name_involved_columns(a: np.ndarray, basis: np.ndarray | None, design: DesignMatrix):
    """Column keys carrying the largest weight in the near-null direction."""
    eigvals, eigvecs = scipy.linalg.eigh(a, subset_by_index=[0, 0])
    direction = eigvecs[:, 0]
    if basis is not None:
        direction = basis @ direction
    loads = np.abs(direction[:-1])  # drop the intercept coordinate
    order = np.argsort(-loads)
    keys = [design.column_map.columns[i].key for i in order[:2] if loads[i] > 1e-8]
    if not keys:
        keys = [design.column_map.columns[order[0]].key]
    return tuple(keys)


def fit(
    design: DesignMatrix,
    collinearity: str = "error",
    ridge_scale: float = 1e-8,
) -> FitResult:
    """Solve the weighted least-squares problem for one design.

    Deterministic: identical input bits give identical output bits. The
    ``collinearity`` policy decides what a singular normal matrix does:
    "error" raises CollinearityError, "ridge" adds jitter and flags it.
    """
    if collinearity not in ("error", "ridge"):
        raise ValueError(f"unknown collinearity policy {collinearity!r}")
    n, p_cols = design.n_rows, design.n_cols
    p = p_cols + 1  # with intercept
    if np.any(design.weights <= 0):
        raise ValueError("all weights must be positive")

    x = design.matrix()
    y = design.response
    w = design.weights

    # Normal equations including the intercept column of ones.
    xw = x.multiply(w[:, None]).tocsc()
    m = np.empty((p, p))
    m[:p_cols, :p_cols] = (x.T @ xw).toarray()
    col_wsums = np.asarray(xw.sum(axis=0)).ravel()
    m[:p_cols, p_cols] = col_wsums
    m[p_cols, :p_cols] = col_wsums
    m[p_cols, p_cols] = w.sum()
    b = np.empty(p)
    b[:p_cols] = x.T @ (w * y)
    b[p_cols] = w @ y

    basis = _constraint_basis(design, p)
    if basis is None:
        a = m
        rhs = b
    else:
        a = basis.T @ m @ basis
        rhs = basis.T @ b
    q = a.shape[0]

    dof = n - q
    if dof <= 0:
        raise SizingError(
            f"need more rows than parameters: n_rows={n}, parameters={q}"
        )

    lower, min_rel_pivot = _cholesky_with_pivot_check(a)
    ridge_applied = False
    ridge_lambda = 0.0
    if lower is None or min_rel_pivot < PIVOT_RTOL:
        if collinearity == "error":
            raise CollinearityError(_name_involved_columns(a, basis, design))
        ridge_lambda = ridge_scale * np.trace(a) / q
        a = a + ridge_lambda * np.eye(q)
        lower, min_rel_pivot = _cholesky_with_pivot_check(a)
        if lower is None:
            raise CollinearityError(_name_involved_columns(a, basis, design))
        ridge_applied = True

    coef_q = scipy.linalg.cho_solve((lower, True), rhs)
    coef = basis @ coef_q if basis is not None else coef_q

    fitted = x @ coef[:p_cols] + coef[p_cols]
    resid = y - fitted
    sigma2 = float(w @ (resid * resid) / dof)

    # Diagonal of (A'WA)^-1 in the original coordinates: solve L t = B' and
    # accumulate squared columns (B is the constraint basis, or identity).
    target = basis.T if basis is not None else np.eye(q)
    t = scipy.linalg.solve_triangular(lower, target, lower=True)
    var = sigma2 * np.einsum("ij,ij->j", t, t)
    se = np.sqrt(np.maximum(var, 0.0))

    diagnostics = FitDiagnostics(
        ridge_applied=ridge_applied,
        ridge_lambda=ridge_lambda,
        constraints_applied=tuple(name for name, _ in design.constraints),
        min_rel_pivot=min_rel_pivot,
        condition_warning=min_rel_pivot < 1e-8,
    )
    return FitResult(
        coefficients=coef[:p_cols],
        intercept=float(coef[p_cols]),
        std_errors=se[:p_cols],
        intercept_se=float(se[p_cols]),
        sigma2=sigma2,
        dof=dof,
        column_map=design.column_map,
        diagnostics=diagnostics,
    )


def weight_scale_check(design: DesignMatrix, factor: float, rtol: float = 1e-10) -> bool:
    """True iff rescaling every weight by ``factor`` leaves the fit's
    coefficients and standard errors unchanged to ``rtol`` relative.

    Uniform weight rescaling cancels out of both the coefficients and (via
    the residual variance) the standard errors, so this should hold for any
    positive factor; it backs the choice to give both split-shift rows the
    full duration as weight.
    """
    if factor <= 0:
        raise ValueError("factor must be positive")
    base = fit(design, collinearity="ridge")
    scaled = fit(design.scaled_weights(factor), collinearity="ridge")

    def close(a, b):
        return np.allclose(a, b, rtol=rtol, atol=1e-12)

    return bool(
        close(base.coefficients, scaled.coefficients)
        and close(base.intercept, scaled.intercept)
        and close(base.std_errors, scaled.std_errors)
        and close(base.intercept_se, scaled.intercept_se)
    )
