"""Numerical kernels: symmetric eigensolver wrapper, pseudo-inverse, basis
completion, clamped cubic B-splines, least squares and the Gaussian kernel."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DomainError, SingularDesign

SPLINE_DEGREE = 3
# Relative tolerance under which two absolute entries count as tied when
# choosing the eigenvector sign.
_SIGN_TIE = 1e-12
_MAX_CONDITION = 1e10


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def normalize_sign(v):
    """Flip ``v`` so that its entry of largest magnitude is positive.

    Entries within a relative 1e-12 of the maximum are treated as ties and
    the lowest index among them decides.
    """
    v = np.asarray(v, dtype=float)
    mag = np.abs(v)
    top = mag.max()
    if top == 0:
        return v
    idx = int(np.flatnonzero(mag >= top * (1 - _SIGN_TIE))[0])
    return -v if v[idx] < 0 else v


def sym_eigen(A):
    """Full eigendecomposition of a symmetric matrix, eigenvalues descending.

    Each eigenvector is sign-normalized with :func:`normalize_sign`.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.T) > 1e-10 * scale:
        raise DomainError("matrix is not symmetric")
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    order = np.argsort(w, kind="stable")[::-1]
    w = w[order]
    V = V[:, order]
    for j in range(V.shape[1]):
        V[:, j] = normalize_sign(V[:, j])
    return EigenResult(eigenvalues=w, eigenvectors=V)


def pseudo_inverse(A, tol_ratio=1e-10):
    """Moore-Penrose inverse of a symmetric positive semi-definite matrix.

    Eigenvalues below ``tol_ratio * lambda_max`` are treated as zero.
    """
    eig = sym_eigen(A)
    lam, V = eig.eigenvalues, eig.eigenvectors
    if lam.size == 0:
        return np.zeros_like(np.asarray(A, dtype=float))
    norm = np.max(np.abs(lam))
    if lam[-1] < -1e-10 * norm:
        raise DomainError(f"matrix is not positive semi-definite (eigenvalue {lam[-1]:.3e})")
    inv = np.zeros_like(lam)
    keep = lam > tol_ratio * lam[0]
    inv[keep] = 1.0 / lam[keep]
    P = (V * inv) @ V.T
    return 0.5 * (P + P.T)


def complete_basis(axes, p=None):
    """Orthonormal basis of the orthogonal complement of ``axes``.

    Canonical vectors e_1, ..., e_p are orthogonalized in index order against
    the axes and the columns accepted so far; those whose remaining norm
    falls under 1e-8 are skipped. Returns a p x (p - k) matrix.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]
    if p is None:
        if not axes:
            raise DomainError("dimension unknown: pass p when axes is empty")
        p = axes[0].shape[0]
    k = len(axes)
    if k >= p:
        raise DomainError(f"cannot complete {k} axes in dimension {p}")
    basis = list(axes)
    out = []
    for i in range(p):
        v = np.zeros(p)
        v[i] = 1.0
        # two Gram-Schmidt passes keep orthogonality at machine precision
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        nrm = np.linalg.norm(v)
        if nrm < 1e-8:
            continue
        v /= nrm
        basis.append(v)
        out.append(v)
        if len(out) == p - k:
            break
    return np.column_stack(out)


@dataclass(frozen=True)
class SplineBasis:
    """Clamped cubic B-spline basis with ``knot_count`` uniform interior knots
    over ``[t_min, t_max]``; it has ``knot_count + 4`` functions."""

    knot_count: int
    t_min: float
    t_max: float

    def __post_init__(self):
        if self.knot_count < 0:
            raise DomainError("knot_count must be non-negative")
        if not self.t_max > self.t_min:
            raise DomainError(f"empty spline range [{self.t_min}, {self.t_max}]")

    @property
    def degree(self):
        return SPLINE_DEGREE

    @property
    def basis_size(self):
        return self.knot_count + 4

    @property
    def knots(self):
        inner = np.linspace(self.t_min, self.t_max, self.knot_count + 2)
        return np.concatenate([[self.t_min] * 3, inner, [self.t_max] * 3])


def spline_design(basis, t):
    """Evaluate every basis function at every ``t``; returns an m x L matrix.

    Values outside ``[t_min, t_max]`` are clamped to the boundary first.
    """
    t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), basis.t_min, basis.t_max)
    U = basis.knots
    L = basis.basis_size
    deg = SPLINE_DEGREE
    # knot span s with U[s] <= t < U[s+1]; the right end belongs to the last span
    span = np.searchsorted(U, t, side="right") - 1
    span = np.clip(span, deg, L - 1)

    m = t.shape[0]
    N = np.zeros((deg + 1, m))
    N[0] = 1.0
    left = np.zeros((deg + 1, m))
    right = np.zeros((deg + 1, m))
    for j in range(1, deg + 1):
        left[j] = t - U[span + 1 - j]
        right[j] = U[span + j] - t
        saved = np.zeros(m)
        for r in range(j):
            temp = N[r] / (right[r + 1] + left[j - r])
            N[r] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        N[j] = saved

    out = np.zeros((m, L))
    rows = np.arange(m)
    for r in range(deg + 1):
        out[rows, span - deg + r] = N[r]
    return out


def least_squares(B, y, ridge=0.0):
    """Minimize ``||B a - y||^2 + ridge ||a||^2`` through a QR factorization.

    ``y`` may be a vector or an m x q matrix of right-hand sides sharing the
    same factorization.
    """
    B = np.asarray(B, dtype=float)
    y = np.asarray(y, dtype=float)
    if ridge < 0:
        raise DomainError("ridge must be non-negative")
    m, L = B.shape
    if ridge > 0:
        A = np.vstack([B, math.sqrt(ridge) * np.eye(L)])
        rhs = np.concatenate([y, np.zeros((L,) + y.shape[1:])])
    else:
        if m < L:
            raise SingularDesign(f"{m} equations for {L} unknowns", condition=math.inf)
        A, rhs = B, y
    Q, R = np.linalg.qr(A)
    if ridge == 0:
        cond = np.linalg.cond(R)
        if not cond < _MAX_CONDITION:
            raise SingularDesign(
                f"design matrix is rank deficient (condition estimate {cond:.3e})",
                condition=cond,
            )
    return solve_triangular(R, Q.T @ rhs)


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "gaussian"
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.kind != "gaussian":
            raise DomainError(f"unsupported kernel {self.kind!r}")
        if not self.bandwidth > 0:
            raise DomainError("bandwidth must be positive")


_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def kernel_eval(spec, u):
    """Standard Gaussian density at ``u`` (scalar or array)."""
    u = np.asarray(u, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * u * u)
    return float(out) if out.ndim == 0 else out
