"""Fitting loop and the fitted auto-associative model.

Each iteration picks an axis orthogonal to the previous ones ([A]),
projects the residuals on it ([P]), regresses the residuals on that
principal variable ([R]) and subtracts the fitted values ([U]).
"""

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import DataMatrix, center, init_state
from .errors import AAMError, FormatError, NothingToFit, ShapeError
from .indices import ProjectedVariance, index_from_dict, index_to_dict, index_value, solve_axis
from .regressors import RegressorSpec, fit_regressor, regressor_from_dict

FORMAT_VERSION = 1
# Residual variance below this fraction of the total variance is zero.
_ZERO_VARIANCE_RATIO = 1e-20


@dataclass
class StepRecord:
    """One iteration. ``centering`` is max_j |mean_i s^k(Y^k_i)_j|; exact
    zero up to rounding for linear and spline, a finite-sample bias for
    the kernel smoother."""

    axis: np.ndarray
    index_value: float
    residual_variance: float
    q: float
    centering: float = 0.0


@dataclass
class FitReport:
    """What happened during :func:`fit`.

    ``q_curve`` has ``d_requested + 1`` entries; after an early stop on zero
    residual variance it is padded with ones. ``residual_history[k]`` is R^k.
    """

    steps: list
    principal_values: np.ndarray
    residuals: np.ndarray
    residual_history: list
    total_variance: float
    q_curve: np.ndarray
    status: str = "complete"
    stopped_at: int = None

    @property
    def index_values(self):
        return [s.index_value for s in self.steps]

    def correlations(self):
        """Sample correlations corr(Y^k, Y^(k+1)); nan where a column is constant."""
        Y = self.principal_values
        out = []
        for k in range(Y.shape[1] - 1):
            u, v = Y[:, k] - Y[:, k].mean(), Y[:, k + 1] - Y[:, k + 1].mean()
            den = np.sqrt((u @ u) * (v @ v))
            out.append(float(u @ v / den) if den > 0 else float("nan"))
        return out


@dataclass
class AdditivityReport:
    deviation: np.ndarray
    max_deviation: float
    max_lower_deviation: float
    additive: bool


@dataclass
class AutoAssociativeModel:
    mean: np.ndarray
    axes: list
    regressors: list
    q_curve: np.ndarray
    index: object = field(default_factory=ProjectedVariance)
    regressor_spec: RegressorSpec = field(default_factory=lambda: RegressorSpec("linear"))
    y_range: np.ndarray = None

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.axes = [np.asarray(a, dtype=float) for a in self.axes]
        self.q_curve = np.asarray(self.q_curve, dtype=float)
        if self.y_range is None:
            self.y_range = np.zeros((self.d, 2))
        self.y_range = np.asarray(self.y_range, dtype=float).reshape(self.d, 2)

    @property
    def p(self):
        return self.mean.shape[0]

    @property
    def d(self):
        return len(self.axes)

    def _as_rows(self, X, width, what):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != width:
            raise ShapeError(f"{what} must have {width} columns, got shape {X.shape}")
        return X

    def encode(self, X):
        """Principal values and final residuals of the rows of ``X``."""
        R = self._as_rows(X, self.p, "data") - self.mean
        Y = np.empty((R.shape[0], self.d))
        for k, (a, reg) in enumerate(zip(self.axes, self.regressors)):
            Y[:, k] = R @ a
            R = R - reg(Y[:, k])
        return Y, R

    def transform(self, X):
        return self.encode(X)[0]

    def reconstruct(self, Y):
        Y = self._as_rows(Y, self.d, "principal values")
        out = np.tile(self.mean, (Y.shape[0], 1))
        for k, reg in enumerate(self.regressors):
            out = out + reg(Y[:, k])
        return out

    def evaluate_F(self, x):
        """Residual left by the auto-associative map; zero on the manifold."""
        x = np.asarray(x, dtype=float)
        R = self.encode(x)[1]
        return R[0] if x.ndim == 1 else R

    def information_ratio(self):
        return self.q_curve.copy()

    def residual_variances(self, X):
        """sigma^2(R^k) for k = 0..d on the rows of ``X``."""
        R = self._as_rows(X, self.p, "data") - self.mean
        out = [_variance(R)]
        for a, reg in zip(self.axes, self.regressors):
            R = R - reg(R @ a)
            out.append(_variance(R))
        return np.array(out)

    def check_additive(self, probes=None, tol=1e-8):
        """Max deviation of <a^j, s^k(t)> from delta_jk * t over probe grids.

        ``probes`` is a list with one grid per axis; by default 25 points
        over each training range of the principal variables.
        """
        if probes is None:
            probes = [np.linspace(lo, hi, 25) for lo, hi in self.y_range]
        A = np.array(self.axes).reshape(self.d, self.p)
        dev = np.zeros((self.d, self.d))
        for k, (reg, grid) in enumerate(zip(self.regressors, probes)):
            t = np.atleast_1d(np.asarray(grid, dtype=float))
            proj = reg(t) @ A.T
            target = np.zeros_like(proj)
            target[:, k] = t
            dev[:, k] = np.max(np.abs(proj - target), axis=0)
        lower = dev[np.triu_indices(self.d)] if self.d else np.zeros(0)
        max_dev = float(dev.max()) if self.d else 0.0
        return AdditivityReport(
            deviation=dev,
            max_deviation=max_dev,
            max_lower_deviation=float(lower.max()) if lower.size else 0.0,
            additive=max_dev <= tol,
        )

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "p": self.p,
            "d": self.d,
            "mean": self.mean.tolist(),
            "axes": [a.tolist() for a in self.axes],
            "q_curve": self.q_curve.tolist(),
            "index": index_to_dict(self.index),
            "regressor_spec": self.regressor_spec.to_dict(),
            "y_range": self.y_range.tolist(),
            "regressors": [r.to_dict() for r in self.regressors],
        }

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise FormatError("model file must hold a JSON object")
        if d.get("version") != FORMAT_VERSION:
            raise FormatError(f"unsupported model version {d.get('version')!r}")
        try:
            model = cls(
                mean=d["mean"],
                axes=d["axes"],
                regressors=[regressor_from_dict(r) for r in d["regressors"]],
                q_curve=d["q_curve"],
                index=index_from_dict(d["index"]),
                regressor_spec=RegressorSpec.from_dict(d["regressor_spec"]),
                y_range=d.get("y_range"),
            )
        except (KeyError, TypeError, ValueError, AAMError) as exc:
            raise FormatError(f"malformed model: {exc}") from exc
        if model.p != d["p"] or model.d != d["d"] or len(model.regressors) != model.d:
            raise FormatError("model dimensions are inconsistent")
        if any(a.shape != (model.p,) for a in model.axes) or model.q_curve.shape != (model.d + 1,):
            raise FormatError("model arrays have inconsistent shapes")
        return model


def _variance(R):
    return float(np.sum(R * R) / R.shape[0])


def _run(step, fn, *args):
    try:
        return fn(*args)
    except AAMError as exc:
        exc.step = step
        raise


def fit(data, d, index=None, spec=None, q_threshold=None, check_tol=1e-8):
    """Run ``d`` iterations of the axis / projection / regression / update loop.

    Returns ``(model, report)``. The loop ends early when the residual
    variance vanishes (``report.status == "stopped_early"``) or when
    ``q_threshold`` is reached (``"threshold"``).
    """
    index = ProjectedVariance() if index is None else index
    spec = RegressorSpec("linear") if spec is None else spec
    if not isinstance(data, DataMatrix):
        data = DataMatrix(data)
    if data.n < 2:
        raise NothingToFit("need at least two samples")
    if not 1 <= d <= data.p:
        raise ShapeError(f"target dimension must lie in [1, {data.p}], got {d}")

    ds = center(data)
    total = ds.total_variance
    if not total > 0:
        raise NothingToFit("data has zero variance")
    state = init_state(ds)
    history = [state.residuals]
    steps, regressors, ranges = [], [], []
    q = [0.0]
    status, stopped_at = "complete", None

    for k in range(d):
        if _variance(state.residuals) <= _ZERO_VARIANCE_RATIO * total:
            status, stopped_at = "stopped_early", k
            break
        R = state.residuals
        a = _run("A", solve_axis, R, index, state.axes)
        value = _run("A", index_value, R, index, a)
        y = R @ a
        reg = _run("R", fit_regressor, R, a, state.axes, spec)
        fitted = reg(y)
        new_R = R - fitted
        state.push(a, y, new_R)
        _run("U", state.check, check_tol)

        var = _variance(new_R)
        q_k = 1.0 - var / total
        if spec.kind == "kernel" and q_k < q[-1]:
            warnings.warn(
                f"information ratio decreased at step {k + 1} ({q[-1]:.6g} -> {q_k:.6g})",
                RuntimeWarning,
                stacklevel=2,
            )
        q.append(q_k)
        regressors.append(reg)
        ranges.append((float(y.min()), float(y.max())))
        steps.append(StepRecord(axis=a, index_value=value, residual_variance=var, q=q_k,
                                centering=float(np.abs(fitted.mean(axis=0)).max())))
        history.append(new_R)
        if q_threshold is not None and q_k >= q_threshold:
            if k + 1 < d:
                status, stopped_at = "threshold", k + 1
            break

    model = AutoAssociativeModel(
        mean=ds.mean,
        axes=list(state.axes),
        regressors=regressors,
        q_curve=np.array(q),
        index=index,
        regressor_spec=spec,
        y_range=np.array(ranges).reshape(-1, 2),
    )
    q_report = np.array(q)
    if status == "stopped_early":
        q_report = np.concatenate([q_report, np.ones(d + 1 - len(q))])
    report = FitReport(
        steps=steps,
        principal_values=state.principal_values,
        residuals=state.residuals,
        residual_history=history,
        total_variance=total,
        q_curve=q_report,
        status=status,
        stopped_at=stopped_at,
    )
    return model, report


def transform(model, X_new):
    return model.transform(X_new)


def reconstruct(model, Y):
    return model.reconstruct(Y)


def evaluate_F(model, x):
    return model.evaluate_F(x)


def information_ratio(model):
    return model.information_ratio()


def check_additive(model, probes=None, tol=1e-8):
    return model.check_additive(probes, tol)


def dumps(model):
    return json.dumps(model.to_dict(), indent=1) + "\n"


def save(model, path):
    Path(path).write_text(dumps(model), encoding="utf-8")


def load(path):
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: not a valid model file ({exc})") from exc
    return AutoAssociativeModel.from_dict(raw)
