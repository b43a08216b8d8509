"""Dataset ingestion, centering and the residual bookkeeping of the fit loop."""

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, EmptyInput, InvariantViolation, ParseError

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class DataMatrix:
    """n samples in p dimensions, one sample per row."""

    values: np.ndarray
    column_names: tuple = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DomainError(f"expected a non-empty n x p matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("data contains NaN or infinite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.column_names is not None:
            names = tuple(str(c) for c in self.column_names)
            if len(names) != values.shape[1]:
                raise DomainError(
                    f"{len(names)} column names for {values.shape[1]} columns"
                )
            object.__setattr__(self, "column_names", names)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class CenteredDataset:
    centered: np.ndarray
    mean: np.ndarray
    total_variance: float

    @property
    def n(self):
        return self.centered.shape[0]

    @property
    def p(self):
        return self.centered.shape[1]


@dataclass
class ResidualState:
    """Mutable state of the fitting loop.

    ``residuals`` holds R^k, ``axes`` the k directions chosen so far and
    ``principal_values`` the n x k matrix of principal variables.
    """

    residuals: np.ndarray
    step: int = 0
    axes: list = field(default_factory=list)
    principal_values: np.ndarray = None

    def __post_init__(self):
        if self.principal_values is None:
            self.principal_values = np.zeros((self.residuals.shape[0], 0))

    def push(self, axis, y, residuals):
        self.axes.append(np.asarray(axis, dtype=float))
        self.principal_values = np.column_stack([self.principal_values, y])
        self.residuals = residuals
        self.step += 1

    def check(self, tol=1e-8):
        """Raise :class:`InvariantViolation` if the residuals have a component
        along an already chosen axis, or if the axes are not orthonormal."""
        if not self.axes:
            return
        A = np.array(self.axes)
        proj = np.abs(self.residuals @ A.T)
        bound = tol * (1.0 + np.linalg.norm(self.residuals, axis=1))
        worst = np.max(proj - bound[:, None])
        if worst > 0:
            raise InvariantViolation(
                f"residuals not orthogonal to earlier axes at step {self.step} "
                f"(max projection {proj.max():.3e})"
            )
        gram = A @ A.T
        if np.max(np.abs(gram - np.eye(len(A)))) > 1e-10:
            raise InvariantViolation(f"axes lost orthonormality at step {self.step}")


def load_csv(path, has_header=False):
    """Read a comma-separated numeric file into a :class:`DataMatrix`.

    Rows are numbered from 1 as they appear in the file (a header counts
    as row 1). Blank lines are ignored.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        lines = [(i, row) for i, row in enumerate(csv.reader(fh), start=1)
                 if row and any(cell.strip() for cell in row)]
    if not lines:
        raise EmptyInput(f"{path}: file is empty")

    names = None
    if has_header:
        names = [cell.strip() for cell in lines[0][1]]
        lines = lines[1:]
        if not lines:
            raise EmptyInput(f"{path}: header but no data rows")

    width = len(names) if names is not None else len(lines[0][1])
    values = np.empty((len(lines), width))
    for r, (lineno, row) in enumerate(lines):
        if len(row) != width:
            raise ParseError(
                f"{path}: row {lineno} has {len(row)} fields, expected {width}", row=lineno
            )
        for c, cell in enumerate(row):
            cell = cell.strip()
            if not _NUMBER.match(cell):
                raise ParseError(
                    f"{path}: non-numeric cell {cell!r} at row {lineno}, column {c + 1}",
                    row=lineno, col=c + 1,
                )
            values[r, c] = float(cell)
    return DataMatrix(values, names)


def center(data):
    """Subtract the column means.

    >>> ds = center(DataMatrix([[1.0, 1.0], [3.0, 3.0]]))
    >>> ds.mean.tolist(), ds.total_variance
    ([2.0, 2.0], 2.0)
    """
    X = data.values if isinstance(data, DataMatrix) else DataMatrix(data).values
    mean = X.mean(axis=0)
    centered = X - mean
    total_variance = float(np.sum(centered**2) / X.shape[0])
    return CenteredDataset(centered=centered, mean=mean, total_variance=total_variance)


def init_state(data):
    return ResidualState(residuals=np.array(data.centered, dtype=float, copy=True))
