"""Product quantization of Brownian motion from its sine eigenexpansion.

Brownian motion on [0, T] expands over the orthonormal eigenbasis
``e_k(t) = sqrt(2/T) sin(pi (k - 1/2) t / T)`` with eigenvalues
``lambda_k = (T / (pi (k - 1/2)))^2``.  A product quantizer replaces the
first L expansion coordinates by optimal normal grids of sizes
``N_1 >= ... >= N_L`` chosen so that ``N_1 * ... * N_L`` stays within a
budget while minimizing the total quadratic quantization error

    sum_{k<=L} lambda_k * d(N_k) + sum_{k>L} lambda_k,

where d(m) is the N(0,1) distortion at m levels.  The resulting quantizer
is a weighted family of smooth paths, one per combination of grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gaussian import GaussianQuantizer, cached_normal_quantizer

__all__ = [
    "kl_eigenvalue",
    "kl_eigenfunction",
    "ProductDecomposition",
    "optimal_decomposition",
    "BrownianProductQuantizer",
    "brownian_product_quantizer",
    "build_product_quantizer",
    "save_paths",
]


def kl_eigenvalue(k: int, horizon: float) -> float:
    """k-th eigenvalue of the Brownian covariance operator on [0, horizon]."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    return (horizon / (math.pi * (k - 0.5))) ** 2


def kl_eigenfunction(k: int, t, horizon: float):
    """k-th eigenfunction sqrt(2/T) sin(pi (k-1/2) t / T); vectorized in t."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    t = np.asarray(t, dtype=float)
    return np.sqrt(2.0 / horizon) * np.sin(math.pi * (k - 0.5) * t / horizon)


@dataclass(frozen=True)
class ProductDecomposition:
    """Factor sizes of a product quantizer within a path-count budget.

    ``residual_distortion`` is the total squared quantization error of
    Brownian motion on a unit horizon; it scales by T^2 for horizon T.
    """

    budget: int
    factors: tuple[int, ...]
    d_n: int
    residual_distortion: float

    def __post_init__(self):
        if any(f < 2 for f in self.factors):
            raise ValueError("every factor must be >= 2")
        if any(a < b for a, b in zip(self.factors, self.factors[1:])):
            raise ValueError("factors must be nonincreasing")
        if self.d_n != math.prod(self.factors) or self.d_n > self.budget:
            raise ValueError("d_n must equal the factor product and fit the budget")


def _distortion_at(levels: int) -> float:
    return cached_normal_quantizer(levels).distortion


def optimal_decomposition(budget: int, truncation: int = 20) -> ProductDecomposition:
    """Search the factor sizes minimizing the Brownian quantization error.

    Exhaustive depth-first search over nonincreasing factor sequences with
    product <= budget, each factor >= 2.  The eigenvalue tail beyond the
    decomposition length is exact (the eigenvalue series sums to T^2/2),
    so the objective carries no truncation bias.  Subtrees are pruned with
    an admissible bound built from the best factor still feasible.

    ``truncation`` caps the decomposition length and must be at least
    floor(log2(budget)), the longest achievable sequence.
    """
    if budget < 2:
        raise ValueError("budget must be >= 2")
    max_len = int(math.floor(math.log2(budget)))
    if truncation < max_len:
        raise ValueError(f"truncation {truncation} < achievable length {max_len}")

    lam = np.array([kl_eigenvalue(k, 1.0) for k in range(1, max_len + 1)])
    cumlam = np.concatenate(([0.0], np.cumsum(lam)))

    best_obj = math.inf
    best_factors: list[int] = []

    def extend(prefix: list[int], prod: int, partial: float) -> None:
        nonlocal best_obj, best_factors
        pos = len(prefix)
        cap = prefix[-1] if prefix else budget
        f_max = min(cap, budget // prod)
        if f_max < 2 or pos >= max_len:
            return
        # cheap admissible bound first: a factor f at this position caps
        # the sequence length at pos + 1 + log2 of the leftover budget, and
        # each factor slot can claim at most its full eigenvalue (d >= 0);
        # the bound tightens as f grows, so one failure ends the loop
        for f in range(2, f_max + 1):
            reach = min(max_len, pos + 1 + int(math.log2(budget // (prod * f))))
            if partial - (cumlam[reach] - cumlam[pos]) >= best_obj:
                break
            obj = partial + lam[pos] * (_distortion_at(f) - 1.0)
            # every deeper factor is <= f, so it contributes >= lam*(d(f)-1)
            subtree_bound = obj + (cumlam[reach] - cumlam[pos + 1]) * (_distortion_at(f) - 1.0)
            prefix.append(f)
            if obj < best_obj:
                best_obj = obj
                best_factors = list(prefix)
            if subtree_bound < best_obj:
                extend(prefix, prod * f, obj)
            prefix.pop()

    extend([], 1, 0.5)
    factors = tuple(best_factors)
    return ProductDecomposition(budget, factors, math.prod(factors), best_obj)


@dataclass(frozen=True)
class BrownianProductQuantizer:
    """Weighted family of quantizer paths for Brownian motion on [0, T].

    Path m corresponds to one combination of marginal grid points; its
    coefficient vector is ``c_k = sqrt(lambda_k) * x_{i_k}`` and its weight
    is the product of the marginal cell weights.  Immutable and safe to
    share across threads.
    """

    horizon: float
    decomposition: ProductDecomposition
    marginal_quantizers: tuple[GaussianQuantizer, ...]
    multi_indices: np.ndarray  # (n_paths, L) zero-based
    weights: np.ndarray  # (n_paths,)
    coefficients: np.ndarray  # (n_paths, L)

    @property
    def n_paths(self) -> int:
        return self.coefficients.shape[0]

    @property
    def n_terms(self) -> int:
        return self.coefficients.shape[1]

    def _frequencies(self) -> np.ndarray:
        k = np.arange(1, self.n_terms + 1)
        return math.pi * (k - 0.5) / self.horizon

    def _check_time(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0) or np.any(t > self.horizon):
            raise ValueError(f"time must lie in [0, {self.horizon}]")
        return t

    def path_value(self, m: int, t):
        """Value of path m at time t (scalar or array)."""
        t = self._check_time(t)
        w = self._frequencies()
        basis = math.sqrt(2.0 / self.horizon) * np.sin(np.multiply.outer(t, w))
        return basis @ self.coefficients[m]

    def path_derivative(self, m: int, t):
        """Time derivative of path m at time t (scalar or array)."""
        t = self._check_time(t)
        w = self._frequencies()
        basis = math.sqrt(2.0 / self.horizon) * w * np.cos(np.multiply.outer(t, w))
        return basis @ self.coefficients[m]

    def all_path_values(self, t: float) -> np.ndarray:
        """Values of every path at a single time, shape (n_paths,)."""
        t = float(self._check_time(t))
        w = self._frequencies()
        return self.coefficients @ (math.sqrt(2.0 / self.horizon) * np.sin(w * t))

    def all_path_derivatives(self, t: float) -> np.ndarray:
        """Derivatives of every path at a single time, shape (n_paths,)."""
        t = float(self._check_time(t))
        w = self._frequencies()
        return self.coefficients @ (math.sqrt(2.0 / self.horizon) * w * np.cos(w * t))


def build_product_quantizer(factors, horizon: float = 1.0, budget: int | None = None) -> BrownianProductQuantizer:
    """Assemble the path family for explicitly given factor sizes."""
    factors = tuple(int(f) for f in factors)
    d_n = math.prod(factors)
    lam = np.array([kl_eigenvalue(k, horizon) for k in range(1, len(factors) + 1)])
    residual = 0.5 + sum(
        kl_eigenvalue(k + 1, 1.0) * (_distortion_at(f) - 1.0) for k, f in enumerate(factors)
    )
    deco = ProductDecomposition(budget if budget is not None else d_n, factors, d_n, residual)
    marginals = tuple(cached_normal_quantizer(f) for f in factors)

    grids = [np.arange(f) for f in factors]
    mesh = np.meshgrid(*grids, indexing="ij")
    multi = np.stack([m.ravel() for m in mesh], axis=1)

    weights = np.ones(1)
    for q in marginals:
        weights = np.multiply.outer(weights, q.weights).ravel()

    points = np.stack([marginals[k].points[multi[:, k]] for k in range(len(factors))], axis=1)
    coeff = np.sqrt(lam)[None, :] * points

    for arr in (multi, weights, coeff):
        arr.setflags(write=False)
    return BrownianProductQuantizer(float(horizon), deco, marginals, multi, weights, coeff)


@lru_cache(maxsize=8)
def brownian_product_quantizer(budget: int, horizon: float = 1.0, truncation: int = 20) -> BrownianProductQuantizer:
    """Optimal product quantizer of Brownian motion for a path budget."""
    deco = optimal_decomposition(budget, truncation)
    return build_product_quantizer(deco.factors, horizon, budget=budget)


def save_paths(q: BrownianProductQuantizer, path) -> None:
    """Dump one line per path: 1-based multi-index, weight, coefficients."""
    L = q.n_terms
    with open(path, "w") as fh:
        fh.write(
            f"# budget {q.decomposition.budget} horizon {q.horizon:.17g} "
            f"factors {','.join(str(f) for f in q.decomposition.factors)}\n"
        )
        for m in range(q.n_paths):
            idx = " ".join(str(i + 1) for i in q.multi_indices[m])
            coeffs = " ".join(f"{c:.17g}" for c in q.coefficients[m])
            fh.write(f"{idx} {q.weights[m]:.17g} {coeffs}\n")
