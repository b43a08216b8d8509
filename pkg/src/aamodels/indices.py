"""Projection indices and the axis solver used at each iteration.

Two indices can be maximized: the projected variance (classical PCA) and the
contiguity quotient, a Rayleigh quotient contrasting the global spread of the
projected residuals with the spread between nearest neighbours. Both admit an
explicit eigenvector solution. The Demartines-Herault and Sammon indices are
provided for evaluation only.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDirection,
    DegenerateNeighborhood,
    DomainError,
    NothingToFit,
)
from .numerics import complete_basis, normalize_sign, sym_eigen

_UNIT_TOL = 1e-10
# A direction whose squared neighbour spread is below this fraction of the
# total squared neighbour spread counts as annihilating all differences.
_DEGENERATE_RATIO = 1e-24


@dataclass(frozen=True)
class ProjectedVariance:
    name = "variance"
    optimizable = True


@dataclass(frozen=True)
class Contiguity:
    """Contiguity quotient; ``symmetrize`` uses the relation m OR m^t."""

    symmetrize: bool = False
    name = "contiguity"
    optimizable = True


@dataclass(frozen=True)
class DiagnosticDH:
    h_scale: float = None
    name = "dh"
    optimizable = False


@dataclass(frozen=True)
class DiagnosticSammon:
    name = "sammon"
    optimizable = False


def index_from_name(name, **options):
    kinds = {
        "variance": ProjectedVariance,
        "contiguity": Contiguity,
        "dh": DiagnosticDH,
        "sammon": DiagnosticSammon,
    }
    try:
        cls = kinds[name]
    except KeyError:
        raise DomainError(f"unknown index {name!r}") from None
    return cls(**options)


def index_to_dict(kind):
    out = {"kind": kind.name}
    if isinstance(kind, Contiguity):
        out["symmetrize"] = kind.symmetrize
    elif isinstance(kind, DiagnosticDH) and kind.h_scale is not None:
        out["h_scale"] = kind.h_scale
    return out


def index_from_dict(d):
    d = dict(d)
    return index_from_name(d.pop("kind"), **d)


@dataclass(frozen=True)
class ContiguityMatrix:
    """First-order nearest-neighbour relation: m[i, j] = 1 iff
    ``j == neighbor_of[i]`` (or the transpose, when ``symmetric``)."""

    neighbor_of: np.ndarray
    symmetric: bool = False

    @property
    def n(self):
        return self.neighbor_of.shape[0]

    def pairs(self):
        """Index arrays (i, j) of the nonzero entries, row-major order."""
        i = np.arange(self.n)
        j = self.neighbor_of
        if not self.symmetric:
            return i, j
        flat = np.unique(np.concatenate([i * self.n + j, j * self.n + i]))
        return flat // self.n, flat % self.n

    def to_dense(self):
        M = np.zeros((self.n, self.n))
        i, j = self.pairs()
        M[i, j] = 1.0
        return M


def nearest_neighbors(residuals, symmetrize=False):
    """Nearest neighbour of each row under the Euclidean distance.

    Ties go to the smallest index. Distances are computed from explicit
    differences so that exact ties survive rounding.
    """
    R = np.asarray(residuals, dtype=float)
    n = R.shape[0]
    if n < 2:
        raise DomainError("nearest neighbours need at least two samples")
    nn = np.empty(n, dtype=np.int64)
    for i in range(n):
        d2 = np.sum((R - R[i]) ** 2, axis=1)
        d2[i] = np.inf
        nn[i] = int(np.argmin(d2))
    return ContiguityMatrix(neighbor_of=nn, symmetric=symmetrize)


def _check_unit(x):
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - 1.0) > _UNIT_TOL:
        raise DomainError(f"direction must have unit norm, got {np.linalg.norm(x)!r}")
    return x


def variance_index(residuals, x):
    """(1/n) sum_i <x, R_i>^2."""
    x = _check_unit(x)
    proj = np.asarray(residuals, dtype=float) @ x
    return float(proj @ proj / proj.shape[0])


def contiguity_index(residuals, M, x):
    R = np.asarray(residuals, dtype=float)
    x = _check_unit(x)
    proj = R @ x
    i, j = M.pairs()
    diff = proj[i] - proj[j]
    den = float(diff @ diff)
    total = float(np.sum((R[i] - R[j]) ** 2))
    if den <= _DEGENERATE_RATIO * total or den == 0.0:
        raise DegenerateDirection("direction annihilates every neighbour difference")
    return float(proj @ proj) / den


def local_covariance(residuals, M):
    """(1/n) sum over contiguous pairs of (R_i - R_j)(R_i - R_j)^t."""
    R = np.asarray(residuals, dtype=float)
    i, j = M.pairs()
    D = R[i] - R[j]
    V = D.T @ D / R.shape[0]
    return 0.5 * (V + V.T)


def covariance(residuals):
    """(1/n) sum_i R_i R_i^t, without re-centering."""
    R = np.asarray(residuals, dtype=float)
    V = R.T @ R / R.shape[0]
    return 0.5 * (V + V.T)


def solve_axis(residuals, kind, forbidden_axes=()):
    """Unit direction maximizing ``kind`` orthogonally to ``forbidden_axes``.

    For the contiguity index the generalized eigenproblem V x = l V* x is
    solved on the range of the local covariance V* inside the feasible
    subspace by whitening with V*'s eigenbasis.
    """
    if not kind.optimizable:
        raise DomainError(f"index {kind.name!r} is evaluation-only")
    R = np.asarray(residuals, dtype=float)
    p = R.shape[1]
    forbidden = [np.asarray(a, dtype=float) for a in forbidden_axes]
    if len(forbidden) >= p:
        raise DomainError("no feasible direction left")
    if not np.any(R):
        raise NothingToFit("residuals are identically zero")

    C = complete_basis(forbidden, p)
    Vc = C.T @ covariance(R) @ C
    Vc = 0.5 * (Vc + Vc.T)

    if isinstance(kind, ProjectedVariance):
        eig = sym_eigen(Vc)
        if not eig.eigenvalues[0] > 0:
            raise NothingToFit("no residual variance in the feasible subspace")
        xc = eig.eigenvectors[:, 0]
    elif isinstance(kind, Contiguity):
        M = nearest_neighbors(R, symmetrize=kind.symmetrize)
        Sc = C.T @ local_covariance(R, M) @ C
        star = sym_eigen(0.5 * (Sc + Sc.T))
        lam = star.eigenvalues
        if not lam[0] > 0:
            raise DegenerateNeighborhood("local covariance vanishes on the feasible subspace")
        keep = lam > 1e-10 * lam[0]
        W = star.eigenvectors[:, keep] / np.sqrt(lam[keep])
        inner = W.T @ Vc @ W
        eig = sym_eigen(0.5 * (inner + inner.T))
        if not eig.eigenvalues[0] > 0:
            raise NothingToFit("no residual variance on the range of the local covariance")
        xc = W @ eig.eigenvectors[:, 0]
    else:
        raise DomainError(f"unsupported index {kind!r}")

    x = C @ xc
    for a in forbidden:
        x -= (a @ x) * a
    x /= np.linalg.norm(x)
    return normalize_sign(x)


def index_value(residuals, kind, x):
    """Value of an optimizable index at direction ``x``."""
    if isinstance(kind, ProjectedVariance):
        return variance_index(residuals, x)
    if isinstance(kind, Contiguity):
        M = nearest_neighbors(residuals, symmetrize=kind.symmetrize)
        return contiguity_index(residuals, M, x)
    raise DomainError(f"unsupported index {kind!r}")


def _pairwise(residuals, x):
    """Row-by-row distances and absolute projected differences, i != j."""
    R = np.asarray(residuals, dtype=float)
    proj = R @ x
    n = R.shape[0]
    dist = np.empty((n, n))
    pd = np.empty((n, n))
    for i in range(n):
        dist[i] = np.sqrt(np.sum((R - R[i]) ** 2, axis=1))
        pd[i] = np.abs(proj - proj[i])
    off = ~np.eye(n, dtype=bool)
    return dist[off], pd[off]


def default_h_scale(residuals, x):
    """Median absolute projected distance between nearest neighbours."""
    R = np.asarray(residuals, dtype=float)
    M = nearest_neighbors(R)
    proj = R @ x
    return float(np.median(np.abs(proj - proj[M.neighbor_of])))


def diagnostic_dh(residuals, x, h_scale=None):
    """Demartines-Herault style index with H(u) = exp(-u / h_scale)."""
    x = _check_unit(x)
    if h_scale is None:
        h_scale = default_h_scale(residuals, x)
    if not h_scale > 0:
        raise DegenerateDirection("H scale must be positive")
    dist, pd = _pairwise(residuals, x)
    return float(np.sum((dist - pd) ** 2 * np.exp(-pd / h_scale)))


def diagnostic_sammon(residuals, x):
    x = _check_unit(x)
    dist, pd = _pairwise(residuals, x)
    den = float(pd @ pd)
    if den <= _DEGENERATE_RATIO * float(dist @ dist) or den == 0.0:
        raise DegenerateDirection("projected pairwise spread is zero")
    return float(np.sum((dist - pd) ** 2)) / den
