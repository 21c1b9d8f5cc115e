"""Numerical kernels: least squares, residualization on the past, partial
correlation tests, a pairwise independence measure and PCA reduction."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import special

log = logging.getLogger(__name__)


class DataError(ValueError):
    """Malformed input data (location is part of the message)."""


class DegenerateSeriesError(ValueError):
    def __init__(self, what: str):
        super().__init__(f"degenerate series: {what} has zero variance")
        self.what = what


class InsufficientSamplesError(ValueError):
    pass


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    rho: float = float("nan")

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class RegressionFit:
    coefficients: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True, eq=False)
class Dataset:
    values: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", tuple(self.names))
        if values.shape[1] != len(self.names):
            raise DataError(f"{values.shape[1]} columns but {len(self.names)} names")
        if len(set(self.names)) != len(self.names):
            raise DataError("duplicate variable names")
        if not np.all(np.isfinite(values)):
            r, c = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at row {r + 1}, column {self.names[c]!r}")

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, var: int) -> np.ndarray:
        return self.values[:, var]

    def check_degenerate(self) -> None:
        sd = self.values.std(axis=0)
        for i, s in enumerate(sd):
            if not s > 1e-12:
                raise DegenerateSeriesError(f"variable {self.names[i]!r}")

    def standardized(self) -> "Dataset":
        self.check_degenerate()
        v = self.values
        return Dataset((v - v.mean(axis=0)) / v.std(axis=0), self.names)

    def warn_if_short(self, gamma: int) -> None:
        if self.T <= (gamma + 1) * self.d:
            log.warning("T=%d is small for gamma=%d and d=%d", self.T, gamma, self.d)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.names)
            for row in self.values:
                w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path: str | Path) -> "Dataset":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in rows[0]]
        body = [r for r in rows[1:] if r]
        if not body:
            raise DataError(f"{path}: no data rows")
        values = np.empty((len(body), len(header)))
        for i, r in enumerate(body, start=2):
            if len(r) != len(header):
                raise DataError(f"{path}: row {i} has {len(r)} cells, expected {len(header)}")
            for j, cell in enumerate(r):
                try:
                    values[i - 2, j] = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric cell {cell!r} at row {i}, column {header[j]!r}"
                    ) from None
        return cls(values, header)


# ---------------------------------------------------------------- regression

def ols_fit(y, X) -> RegressionFit:
    """Minimum-norm least squares of ``y`` on the columns of ``X``."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("ols_fit: empty response")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] == 0:
        return RegressionFit(np.zeros(0), y.copy())
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return RegressionFit(coef, y - X @ coef)


def lagged_matrix(values: np.ndarray, nodes: Sequence[tuple[int, int]], start: int) -> np.ndarray:
    """Columns ``values[t - lag, var]`` for rows ``t = start..T-1``."""
    T = values.shape[0]
    if not nodes:
        return np.empty((T - start, 0))
    return np.column_stack([values[start - lag:T - lag, var] for var, lag in nodes])


def residualize_on_past(data: Dataset, target: int, past: Iterable, gamma: int) -> np.ndarray:
    """Residual of ``target_t`` after an autoregression on lagged nodes.

    ``past`` holds ``(var, lag)`` pairs or ``LaggedNode``s with lag >= 1.
    Rows ``gamma..T-1`` are used; an intercept is always included.
    """
    nodes = []
    for n in past:
        var, lag = (n.var, n.lag) if hasattr(n, "var") else n
        if lag < 1:
            raise ValueError(f"past node ({var}, {lag}) is not strictly lagged")
        if lag > gamma:
            raise ValueError(f"lag {lag} exceeds gamma={gamma}")
        nodes.append((var, lag))
    nodes.sort()
    y = data.values[gamma:, target]
    X = lagged_matrix(data.values, nodes, gamma)
    X = np.column_stack([np.ones(len(y)), X])
    return ols_fit(y, X).residuals


# ---------------------------------------------------------------- CI testing

RHO_CLAMP = 1.0 - 1e-12


def fisher_z(rho: float, n: int, k: int) -> TestResult:
    """Fisher z statistic and two-sided normal p-value for a partial
    correlation computed from ``n`` samples with ``k`` conditioning variables."""
    dof = n - k - 3
    if dof < 1:
        raise InsufficientSamplesError(f"insufficient samples: n={n} with |Z|={k}")
    r = float(np.clip(rho, -RHO_CLAMP, RHO_CLAMP))
    z = 0.5 * math.log((1 + r) / (1 - r)) * math.sqrt(dof)
    p = float(special.erfc(abs(z) / math.sqrt(2)))
    return TestResult(z, min(max(p, 0.0), 1.0), r)


def partial_corr(x, y, Z=None) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    design = np.ones((n, 1))
    if Z is not None and np.size(Z):
        Z = np.asarray(Z, dtype=float)
        design = np.column_stack([design, Z.reshape(n, -1)])
    rx = ols_fit(x, design).residuals
    ry = ols_fit(y, design).residuals
    denom = math.sqrt(float(rx @ rx) * float(ry @ ry))
    if denom == 0.0:
        return 0.0
    return float(rx @ ry) / denom


def ci_test_partial_corr(x, y, Z=None) -> TestResult:
    """Linear partial-correlation test of ``x _||_ y | Z`` (Fisher z)."""
    n = len(x)
    k = 0 if Z is None else np.asarray(Z).reshape(n, -1).shape[1]
    if n - k - 3 < 1:
        raise InsufficientSamplesError(f"insufficient samples: n={n} with |Z|={k}")
    return fisher_z(partial_corr(x, y, Z), n, k)


def partial_corr_from_cov(cov: np.ndarray, i: int, j: int, cond: Sequence[int]) -> float:
    """Partial correlation of columns ``i, j`` given ``cond`` from a
    covariance matrix, via the inverse of the relevant submatrix."""
    idx = [i, j, *cond]
    sub = cov[np.ix_(idx, idx)]
    prec = np.linalg.pinv(sub, hermitian=True)
    denom = math.sqrt(prec[0, 0] * prec[1, 1])
    if not denom > 0:
        return 0.0
    return float(-prec[0, 1] / denom)


# ------------------------------------------------------ independence measure

_K1 = 79.047
_K2 = 7.4129
_GAMMA = 0.37457
_H_GAUSS = 0.5 * (1 + math.log(2 * math.pi))
_N_ANGLES = 64


def entropy_maxent(u: np.ndarray) -> np.ndarray:
    """Maximum-entropy approximation of differential entropy for unit
    variance data (log-cosh and Gaussian-weighted odd contrasts).

    ``u`` may be 2-D; entropies are computed along the last axis.
    """
    u = np.asarray(u, dtype=float)
    a = np.log(np.cosh(u)).mean(axis=-1) - _GAMMA
    b = (u * np.exp(-u ** 2 / 2)).mean(axis=-1)
    return _H_GAUSS - _K1 * a ** 2 - _K2 * b ** 2


def _standardize(v: np.ndarray, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    sd = v.std()
    if not sd > 1e-12:
        raise DegenerateSeriesError(what)
    return (v - v.mean()) / sd


def independence_measure(a, b) -> float:
    """Mutual-information surrogate between two series.

    The pair is whitened and the joint entropy is estimated as the smallest
    sum of marginal max-entropy approximations over rotations of the
    whitened pair (the rotation at which the components look most
    independent).  The estimate is ``H(a) + H(b) - H(a, b)`` floored at 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("independence_measure: inputs must be equal-length vectors")
    if len(a) < 20:
        raise InsufficientSamplesError(f"insufficient samples: n={len(a)} < 20")
    a = _standardize(a, "first argument")
    b = _standardize(b, "second argument")
    r = float(np.clip(a @ b / len(a), -RHO_CLAMP, RHO_CLAMP))
    # symmetric whitening of [[1, r], [r, 1]]
    s1, s2 = 1.0 / math.sqrt(1 + r), 1.0 / math.sqrt(1 - r)
    p, q = (s1 + s2) / 2, (s1 - s2) / 2
    w1, w2 = p * a + q * b, q * a + p * b
    theta = np.linspace(0.0, np.pi / 2, _N_ANGLES, endpoint=False)[:, None]
    c, s = np.cos(theta), np.sin(theta)
    u1 = c * w1 + s * w2
    u2 = -s * w1 + c * w2
    joint = np.min(entropy_maxent(u1) + entropy_maxent(u2)) + 0.5 * math.log(1 - r * r)
    mi = float(entropy_maxent(a) + entropy_maxent(b) - joint)
    return max(mi, 0.0)


# ---------------------------------------------------------------- PCA

def pca_first_component(block) -> np.ndarray:
    """Projection of the standardized columns on their leading principal axis."""
    block = np.asarray(block, dtype=float)
    if block.ndim == 1:
        block = block[:, None]
    sd = block.std(axis=0)
    keep = sd > 1e-12
    if not keep.any():
        raise DegenerateSeriesError("every column of the PCA block")
    z = (block[:, keep] - block[:, keep].mean(axis=0)) / sd[keep]
    if z.shape[1] == 1:
        return z[:, 0].copy()
    cov = z.T @ z / len(z)
    evals, evecs = np.linalg.eigh(cov)
    axis = evecs[:, -1]
    if axis[0] < 0:
        axis = -axis
    comp = z @ axis
    return comp / comp.std()
