"""Brownian-bridge Monte Carlo pricer for knock-out options.

Paths follow the discrete Euler scheme; between consecutive dates the
extremum of the interpolating bridge is either simulated by inverting its
conditional distribution (indicator estimator) or integrated out
analytically (conditional-product estimator, lower variance by Jensen).

Randomness comes from a counter-based generator (Philox) keyed by the
seed, consuming exactly ``2 n`` uniforms per path - one block of normals
via the inverse distribution transform, one block of bridge uniforms - so
any path range can be regenerated independently of how the work is
batched, and (seed, n_paths, n_steps) fully determine the result.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.special import ndtri

from .contracts import BarrierContract, BarrierType, PricingResult
from .models import Model

__all__ = [
    "Estimator",
    "McConfig",
    "McResult",
    "euler_path",
    "rbb_price",
    "rbb_price_levels",
    "estimator_variance_comparison",
]

_BLOCK = 32768  # fixed accumulation block; keeps sums independent of batching
_U_FLOOR = 2.0**-53  # smallest positive uniform the generator can emit


class Estimator(Enum):
    INDICATOR = "indicator"
    CONDITIONAL_PRODUCT = "conditional"


@dataclass(frozen=True)
class McConfig:
    n_steps: int
    n_paths: int
    seed: int
    estimator: Estimator = Estimator.INDICATOR

    def __post_init__(self):
        if self.n_steps < 1 or self.n_paths < 1:
            raise ValueError("n_steps and n_paths must be >= 1")


@dataclass
class McResult:
    price: float
    sample_variance: float
    std_error: float
    elapsed: float

    def as_pricing_result(self) -> PricingResult:
        return PricingResult(
            price=self.price,
            method="rbb",
            elapsed=self.elapsed,
            sample_variance=self.sample_variance,
            std_error=self.std_error,
        )


def euler_path(model: Model, n_steps: int, maturity: float, normals) -> np.ndarray:
    """Discrete Euler recursion from x0 driven by given standard normals.

    ``normals`` has shape (..., n_steps); the result appends the initial
    price, shape (..., n_steps + 1).
    """
    z = np.asarray(normals, dtype=float)
    if z.shape[-1] != n_steps:
        raise ValueError(f"expected {n_steps} normal draws per path, got {z.shape[-1]}")
    dt = maturity / n_steps
    sq = math.sqrt(dt)
    out = np.empty(z.shape[:-1] + (n_steps + 1,))
    out[..., 0] = model.x0
    for k in range(n_steps):
        x = out[..., k]
        out[..., k + 1] = x + model.drift(x) * dt + model.diffusion(x) * sq * z[..., k]
    return out


def _path_draws(seed: int, first_path: int, count: int, n_steps: int):
    """Normals and bridge uniforms for paths [first_path, first_path+count).

    Each path owns 2 n consecutive doubles of the keyed Philox stream, one
    uint64 per double.  ``advance`` moves whole 4-output counter blocks, so
    the skip is done in blocks plus discarded remainder draws.
    """
    offset = first_path * 2 * n_steps
    bg = np.random.Philox(key=seed)
    bg.advance(offset // 4)
    gen = np.random.Generator(bg)
    if offset % 4:
        gen.random(offset % 4)
    u = gen.random((count, 2 * n_steps))
    np.maximum(u, _U_FLOOR, out=u)  # keep uniforms inside the open interval
    return ndtri(u[:, :n_steps]), u[:, n_steps:]


def _simulate_levels(
    model: Model,
    contract: BarrierContract,
    levels: np.ndarray,
    cfg: McConfig,
):
    """Shared-path simulation returning (sum Y, sum Y^2) per barrier level."""
    n = cfg.n_steps
    T = contract.maturity
    dt = T / n
    sq = math.sqrt(dt)
    disc = math.exp(-model.r * T)
    up = contract.barrier_type is BarrierType.UP_AND_OUT
    conditional = cfg.estimator is Estimator.CONDITIONAL_PRODUCT
    q = levels.size

    sums = np.zeros(q)
    sumsq = np.zeros(q)
    done = 0
    while done < cfg.n_paths:
        m = min(_BLOCK, cfg.n_paths - done)
        Z, V = _path_draws(cfg.seed, done, m, n)
        X = np.full(m, float(model.x0))
        if conditional:
            factors = np.ones((m, q))
        else:
            extreme = np.full(m, -np.inf if up else np.inf)
        for k in range(n):
            sig = np.asarray(model.diffusion(X))
            Xn = X + model.drift(X) * dt + sig * sq * Z[:, k]
            if conditional:
                d_prev = X[:, None] - levels[None, :]
                d_next = Xn[:, None] - levels[None, :]
                denom = T * (sig * sig)[:, None]
                with np.errstate(divide="ignore", invalid="ignore"):
                    ex = -2.0 * n * d_prev * d_next / denom
                    body = 1.0 - np.exp(np.minimum(ex, 0.0))
                if up:
                    alive = np.maximum(X, Xn)[:, None] <= levels[None, :]
                else:
                    alive = np.minimum(X, Xn)[:, None] >= levels[None, :]
                factor = np.where(alive, body, 0.0)
                degenerate = (sig == 0.0)[:, None]
                if degenerate.any():
                    factor = np.where(degenerate, alive.astype(float), factor)
                factors *= factor
            else:
                # extremum draw by inverting the bridge law with uniform V
                root = np.sqrt((X - Xn) ** 2 - 2.0 * T * sig * sig * np.log(V[:, k]) / n)
                if up:
                    np.maximum(extreme, 0.5 * (X + Xn + root), out=extreme)
                else:
                    np.minimum(extreme, 0.5 * (X + Xn - root), out=extreme)
            X = Xn
        pay = disc * contract.payoff(X)
        if conditional:
            Y = pay[:, None] * factors
        else:
            alive = extreme[:, None] <= levels[None, :] if up else extreme[:, None] >= levels[None, :]
            Y = pay[:, None] * alive
        # reduce level by level over contiguous rows so the rounding tree
        # does not depend on how many levels share the path set
        Yt = np.ascontiguousarray(Y.T)
        sums += Yt.sum(axis=1)
        sumsq += np.einsum("ij,ij->i", Yt, Yt)
        done += m
    return sums, sumsq


def _results_from_sums(sums, sumsq, n_paths: int, elapsed: float) -> list[McResult]:
    mean = sums / n_paths
    if n_paths > 1:
        var = np.maximum(sumsq - n_paths * mean**2, 0.0) / (n_paths - 1)
    else:
        var = np.zeros_like(mean)
    se = np.sqrt(var / n_paths)
    return [McResult(float(p), float(v), float(s), elapsed) for p, v, s in zip(mean, var, se)]


def rbb_price_levels(
    model: Model,
    contract: BarrierContract,
    levels,
    cfg: McConfig,
) -> list[McResult]:
    """Price the contract at several barrier levels over one shared path set.

    The contract's own barrier is ignored in favor of ``levels``; every
    result carries the shared wall-clock time of the run.
    """
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    start = time.perf_counter()
    sums, sumsq = _simulate_levels(model, contract, levels, cfg)
    return _results_from_sums(sums, sumsq, cfg.n_paths, time.perf_counter() - start)


def rbb_price(model: Model, contract: BarrierContract, cfg: McConfig) -> McResult:
    """Monte Carlo price of a knock-out option with the configured estimator."""
    return rbb_price_levels(model, contract, [contract.barrier], cfg)[0]


def estimator_variance_comparison(
    model: Model,
    contract: BarrierContract,
    cfg: McConfig,
) -> tuple[float, float]:
    """Per-sample variances (indicator, conditional) on the same seed stream."""
    ind = rbb_price(model, contract, replace(cfg, estimator=Estimator.INDICATOR))
    cond = rbb_price(model, contract, replace(cfg, estimator=Estimator.CONDITIONAL_PRODUCT))
    return ind.sample_variance, cond.sample_variance
