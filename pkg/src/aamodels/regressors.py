"""Estimators of the regression function s^k at one iteration.

Every fitted regressor maps a scalar t to a p-vector whose component along
its own axis is exactly t and whose components along earlier axes are
exactly zero; only the coordinates in the orthogonal complement are
estimated from data.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProjection, DomainError, SpecError, ZeroProjectedVariance
from .indices import covariance
from .numerics import (
    KernelSpec,
    SplineBasis,
    complete_basis,
    kernel_eval,
    least_squares,
    spline_design,
)

# Kernel denominators below this are treated as underflowed.
_KERNEL_FLOOR = 1e-300


@dataclass(frozen=True)
class RegressorSpec:
    """Which estimator to use and its hyperparameters.

    ``bandwidth`` is a positive float or ``"silverman"``; ``knot_count`` and
    ``ridge`` only matter for splines.
    """

    kind: str = "spline"
    bandwidth: object = "silverman"
    knot_count: int = 4
    ridge: float = 0.0

    def __post_init__(self):
        if self.kind not in ("linear", "kernel", "spline"):
            raise SpecError(f"unknown regressor kind {self.kind!r}")
        if self.kind == "kernel" and self.bandwidth != "silverman":
            if not (isinstance(self.bandwidth, (int, float)) and self.bandwidth > 0):
                raise SpecError("bandwidth must be a positive number or 'silverman'")
        if self.kind == "spline":
            if int(self.knot_count) != self.knot_count or self.knot_count < 0:
                raise SpecError("knot_count must be a non-negative integer")
            if self.ridge < 0:
                raise SpecError("ridge must be non-negative")

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "kernel":
            d["bandwidth"] = self.bandwidth
        elif self.kind == "spline":
            d["knot_count"] = int(self.knot_count)
            d["ridge"] = float(self.ridge)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class FittedRegressor:
    """Common interface: ``axis`` plus :meth:`__call__` evaluating s(t)."""

    kind = None

    def __init__(self, axis):
        self.axis = np.asarray(axis, dtype=float)

    @property
    def p(self):
        return self.axis.shape[0]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = self._evaluate(t)
        return out[0] if scalar else out

    def _evaluate(self, t):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


class LinearRegressor(FittedRegressor):
    kind = "linear"

    def __init__(self, axis, direction):
        super().__init__(axis)
        self.direction = np.asarray(direction, dtype=float)

    def _evaluate(self, t):
        return t[:, None] * self.direction[None, :]

    def to_dict(self):
        return {"kind": "linear", "axis": self.axis.tolist(), "b": self.direction.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["axis"], d["b"])


class _ComplementRegressor(FittedRegressor):
    """Regressor estimated coordinate-wise in a basis of the complement."""

    def __init__(self, axis, complement):
        super().__init__(axis)
        self.complement = np.asarray(complement, dtype=float).reshape(self.p, -1)

    def _coordinates(self, t):
        raise NotImplementedError

    def _evaluate(self, t):
        out = t[:, None] * self.axis[None, :]
        if self.complement.shape[1]:
            out = out + self._coordinates(t) @ self.complement.T
        return out


class KernelRegressor(_ComplementRegressor):
    """Nadaraya-Watson estimate with a Gaussian kernel."""

    kind = "kernel"

    def __init__(self, axis, complement, y, coords, bandwidth):
        super().__init__(axis, complement)
        self.y = np.asarray(y, dtype=float)
        self.coords = np.asarray(coords, dtype=float).reshape(self.y.shape[0], -1)
        self.bandwidth = float(bandwidth)
        self._kernel = KernelSpec("gaussian", self.bandwidth)

    def weights(self, t):
        """m x n weight matrix; each row sums to one.

        Where every kernel value underflows, all the weight goes to the
        closest training sample (smallest index on ties).
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        K = kernel_eval(self._kernel, (t[:, None] - self.y[None, :]) / self.bandwidth)
        K = np.atleast_2d(K)
        den = K.sum(axis=1)
        bad = ~(den > _KERNEL_FLOOR)
        W = np.empty_like(K)
        W[~bad] = K[~bad] / den[~bad, None]
        if np.any(bad):
            nearest = np.argmin(np.abs(t[bad, None] - self.y[None, :]), axis=1)
            W[bad] = 0.0
            W[np.flatnonzero(bad), nearest] = 1.0
        return W

    def _coordinates(self, t):
        return self.weights(t) @ self.coords

    def to_dict(self):
        return {
            "kind": "kernel",
            "axis": self.axis.tolist(),
            "complement": self.complement.tolist(),
            "y": self.y.tolist(),
            "coords": self.coords.tolist(),
            "bandwidth": self.bandwidth,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["axis"], d["complement"], d["y"], d["coords"], d["bandwidth"])


class SplineRegressor(_ComplementRegressor):
    """Least-squares cubic spline estimate, constant outside the fitted range."""

    kind = "spline"

    def __init__(self, axis, complement, basis, coef):
        super().__init__(axis, complement)
        self.basis = basis
        self.coef = np.asarray(coef, dtype=float).reshape(basis.basis_size, -1)

    def _coordinates(self, t):
        return spline_design(self.basis, t) @ self.coef

    def to_dict(self):
        return {
            "kind": "spline",
            "axis": self.axis.tolist(),
            "complement": self.complement.tolist(),
            "knot_count": self.basis.knot_count,
            "t_min": self.basis.t_min,
            "t_max": self.basis.t_max,
            "coef": self.coef.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        basis = SplineBasis(int(d["knot_count"]), float(d["t_min"]), float(d["t_max"]))
        return cls(d["axis"], d["complement"], basis, d["coef"])


_KINDS = {"linear": LinearRegressor, "kernel": KernelRegressor, "spline": SplineRegressor}


def regressor_from_dict(d):
    try:
        cls = _KINDS[d["kind"]]
    except KeyError:
        raise DomainError(f"unknown regressor kind {d.get('kind')!r}") from None
    return cls.from_dict(d)


def _complement(a, earlier_axes):
    axes = [np.asarray(e, dtype=float) for e in earlier_axes] + [a]
    p = a.shape[0]
    if len(axes) == p:
        return np.zeros((p, 0))
    return complete_basis(axes, p)


def fit_linear(residuals, a, earlier_axes=()):
    """Regression axis b = V a / (a^t V a) with V the residual covariance.

    The component of ``b`` along ``a`` is one by construction and the
    components along ``earlier_axes`` are removed.
    """
    R = np.asarray(residuals, dtype=float)
    a = np.asarray(a, dtype=float)
    V = covariance(R)
    va = float(a @ V @ a)
    if not va > 1e-14 * np.trace(V):
        raise ZeroProjectedVariance(f"projected variance {va:.3e} is zero along the axis")
    b = V @ a / va
    for e in earlier_axes:
        e = np.asarray(e, dtype=float)
        b = b - (e @ b) * e
    b = b + (1.0 - a @ b) * a
    return LinearRegressor(a, b)


def silverman_bandwidth(y):
    """1.06 * sd(y) * n^(-1/5), with the unbiased standard deviation."""
    y = np.asarray(y, dtype=float)
    return 1.06 * float(np.std(y, ddof=1)) * y.shape[0] ** (-0.2)


def fit_kernel(residuals, a, earlier_axes=(), spec=RegressorSpec("kernel")):
    R = np.asarray(residuals, dtype=float)
    a = np.asarray(a, dtype=float)
    if R.shape[0] < 2:
        raise SpecError("kernel regression needs at least two samples")
    y = R @ a
    if np.ptp(y) == 0:
        raise DegenerateProjection("all principal values are identical")
    h = silverman_bandwidth(y) if spec.bandwidth == "silverman" else float(spec.bandwidth)
    if not h > 0:
        raise SpecError(f"bandwidth {h!r} is not positive")
    C = _complement(a, earlier_axes)
    return KernelRegressor(a, C, y, R @ C, h)


def fit_spline(residuals, a, earlier_axes=(), spec=RegressorSpec("spline")):
    R = np.asarray(residuals, dtype=float)
    a = np.asarray(a, dtype=float)
    n = R.shape[0]
    N = int(spec.knot_count)
    if N + 4 > n:
        raise SpecError(f"{N} knots need at least {N + 4} samples, got {n}")
    y = R @ a
    if np.ptp(y) == 0:
        raise DegenerateProjection("all principal values are identical")
    basis = SplineBasis(N, float(y.min()), float(y.max()))
    C = _complement(a, earlier_axes)
    if C.shape[1] == 0:
        coef = np.zeros((basis.basis_size, 0))
    else:
        B = spline_design(basis, y)
        coef = least_squares(B, R @ C, ridge=spec.ridge)
    return SplineRegressor(a, C, basis, coef)


def fit_regressor(residuals, a, earlier_axes, spec):
    if spec.kind == "linear":
        return fit_linear(residuals, a, earlier_axes)
    if spec.kind == "kernel":
        return fit_kernel(residuals, a, earlier_axes, spec)
    return fit_spline(residuals, a, earlier_axes, spec)


def evaluate(reg, t):
    """s(t) in ambient coordinates; a p-vector for scalar t, m x p otherwise."""
    return reg(t)
