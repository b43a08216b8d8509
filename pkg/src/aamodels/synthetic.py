"""Seeded dataset generators and a reference PCA.

Random numbers come straight from the PCG64 bit stream: uniforms take the
top 53 bits of each 64-bit draw and normals use the cosine branch of the
Box-Muller transform, so a given seed yields the same data regardless of
how numpy's higher-level samplers evolve.
"""

import math
from dataclasses import dataclass

import numpy as np

from .data import DataMatrix, center
from .errors import SpecError
from .indices import covariance
from .numerics import sym_eigen

KINDS = ("s_shape", "circle", "linear_subspace", "two_clusters")


class _Stream:
    def __init__(self, seed):
        self._bits = np.random.PCG64(seed)

    def uniform(self, size):
        raw = self._bits.random_raw(size)
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, size):
        size = int(np.prod(size)) if np.ndim(size) else int(size)
        u1 = 1.0 - self.uniform(size)
        u2 = self.uniform(size)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a synthetic dataset.

    ``rank`` applies to ``linear_subspace``; ``separation`` and ``spread``
    (half-distance between the blob centers and their standard deviation)
    to ``two_clusters``.
    """

    kind: str
    n: int
    noise_sd: float = 0.0
    seed: int = 0
    ambient_p: int = 2
    rank: int = 2
    separation: float = 3.0
    spread: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown generator {self.kind!r}; expected one of {KINDS}")
        if int(self.n) != self.n or self.n < 1:
            raise SpecError("n must be a positive integer")
        if not self.noise_sd >= 0:
            raise SpecError("noise_sd must be non-negative")
        if int(self.seed) != self.seed or self.seed < 0:
            raise SpecError("seed must be a non-negative integer")
        min_p = 2 if self.kind in ("s_shape", "circle") else 1
        if self.ambient_p < min_p:
            raise SpecError(f"{self.kind} needs ambient_p >= {min_p}")
        if self.kind == "linear_subspace" and not 1 <= self.rank <= self.ambient_p:
            raise SpecError("rank must lie in [1, ambient_p]")
        if self.kind == "two_clusters" and not (self.separation > 0 and self.spread >= 0):
            raise SpecError("separation must be positive and spread non-negative")


def _frame(stream, p, r):
    """Random p x r matrix with orthonormal columns (identity when p == r)."""
    if p == r:
        return np.eye(p)
    G = stream.normal(p * r).reshape(p, r)
    Q, R = np.linalg.qr(G)
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


def generate(spec):
    """Build the dataset described by ``spec``.

    >>> X = generate(GeneratorSpec("circle", n=4))
    >>> X.values.shape
    (4, 2)
    """
    s = _Stream(spec.seed)
    n, p = spec.n, spec.ambient_p
    strata = (np.arange(n) + s.uniform(n)) / n

    if spec.kind == "s_shape":
        t = -1.0 + 2.0 * strata
        X = np.column_stack([t, np.sin(math.pi * t)]) @ _frame(s, p, 2).T
    elif spec.kind == "circle":
        theta = 2.0 * math.pi * strata
        X = np.column_stack([np.cos(theta), np.sin(theta)]) @ _frame(s, p, 2).T
    elif spec.kind == "linear_subspace":
        r = spec.rank
        scales = np.arange(r, 0, -1, dtype=float)
        Z = s.normal(n * r).reshape(n, r) * scales
        X = Z @ _frame(s, p, r).T
    else:
        X = spec.spread * s.normal(n * p).reshape(n, p)
        X[:, 0] += np.where(np.arange(n) % 2 == 0, -spec.separation, spec.separation)

    if spec.noise_sd > 0:
        X = X + spec.noise_sd * s.normal(n * p).reshape(n, p)
    return DataMatrix(X)


def pca_oracle(data, d):
    """Classical PCA through a full eigendecomposition of the covariance.

    Returns the top ``d`` eigenvectors (as a list of p-vectors) and the
    cumulative explained-variance ratios (0, l1/sum, ..., sum_{j<=d} lj/sum).
    """
    ds = center(data if isinstance(data, DataMatrix) else DataMatrix(data))
    if not 0 <= d <= ds.p:
        raise SpecError(f"d must lie in [0, {ds.p}]")
    eig = sym_eigen(covariance(ds.centered))
    lam = np.clip(eig.eigenvalues, 0.0, None)
    total = lam.sum()
    ratios = np.concatenate([[0.0], np.cumsum(lam[:d]) / total]) if total > 0 else np.zeros(d + 1)
    axes = [eig.eigenvectors[:, j].copy() for j in range(d)]
    return axes, np.minimum(ratios, 1.0)
