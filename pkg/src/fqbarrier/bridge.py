"""Conditional laws of the per-interval extremum of the piecewise Euler path.

Between consecutive grid dates the interpolated Euler path is a Brownian
bridge with the diffusion frozen at the left endpoint, so the conditional
distribution of its maximum (resp. minimum) given the endpoints x, y has
the classical closed form

    G_{x,y}(u) = (1 - exp(-2 n (x-u)(y-u) / (T sigma(x)^2))) 1{u >= max(x,y)}
    F_{x,y}(u) = 1 - (1 - exp(-2 n (x-u)(y-u) / (T sigma(x)^2))) 1{u <= min(x,y)}

with n subintervals over a horizon T.  Both distributions invert in closed
form, which is what the simulation path of the Monte Carlo pricer uses.
All functions broadcast over x, y, u and over ``sigma_x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BridgeParams",
    "bridge_max_cdf",
    "bridge_min_cdf",
    "bridge_max_inverse",
    "bridge_min_inverse",
]


@dataclass(frozen=True)
class BridgeParams:
    """Interval geometry and the frozen left-endpoint diffusion value.

    ``sigma_x`` may be an array when evaluating many bridges at once.
    """

    n_steps: int
    horizon: float
    sigma_x: object  # float or ndarray

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.horizon <= 0.0:
            raise ValueError("horizon must be positive")
        if np.any(np.asarray(self.sigma_x) < 0.0):
            raise ValueError("sigma_x must be nonnegative")


def _exponent(x, y, u, p: BridgeParams):
    sig2 = np.asarray(p.sigma_x, dtype=float) ** 2
    return -2.0 * p.n_steps * (x - u) * (y - u) / (p.horizon * sig2)


def bridge_max_cdf(x, y, u, p: BridgeParams):
    """P(max of the bridge <= u | endpoints x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    top = np.maximum(x, y)
    degenerate = np.asarray(p.sigma_x) == 0.0
    if np.all(degenerate):
        return (u >= top).astype(float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ex = _exponent(x, y, u, p)
        body = 1.0 - np.exp(np.minimum(ex, 0.0))
    out = np.where(u >= top, body, 0.0)
    if np.any(degenerate):
        out = np.where(degenerate, (u >= top).astype(float), out)
    return out


def bridge_min_cdf(x, y, u, p: BridgeParams):
    """P(min of the bridge <= u | endpoints x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    bot = np.minimum(x, y)
    degenerate = np.asarray(p.sigma_x) == 0.0
    if np.all(degenerate):
        return (u >= bot).astype(float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ex = _exponent(x, y, u, p)
        body = 1.0 - np.exp(np.minimum(ex, 0.0))
    out = 1.0 - np.where(u <= bot, body, 0.0)
    if np.any(degenerate):
        out = np.where(degenerate, (u >= bot).astype(float), out)
    return out


def _check_probability(w):
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0.0) or np.any(w >= 1.0):
        raise ValueError("probability must lie strictly inside (0, 1)")
    return w


def _sqrt_discriminant(x, y, log_term, p: BridgeParams):
    sig2 = np.asarray(p.sigma_x, dtype=float) ** 2
    disc = (x - y) ** 2 - 2.0 * p.horizon * sig2 * log_term / p.n_steps
    # log_term <= 0 guarantees disc >= (x-y)^2; anything else is a bug
    if np.any(disc < (x - y) ** 2 - 1e-12):
        raise AssertionError("bridge inverse discriminant fell below (x-y)^2")
    return np.sqrt(disc)


def bridge_max_inverse(x, y, w, p: BridgeParams):
    """Quantile of the bridge maximum: the z >= max(x,y) with G_{x,y}(z) = w."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = _check_probability(w)
    if np.any(np.asarray(p.sigma_x) <= 0.0):
        raise ValueError("bridge_max_inverse requires sigma_x > 0")
    root = _sqrt_discriminant(x, y, np.log1p(-w), p)
    return 0.5 * (x + y + root)


def bridge_min_inverse(x, y, w, p: BridgeParams):
    """Quantile of the bridge minimum: the z <= min(x,y) with F_{x,y}(z) = w."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = _check_probability(w)
    if np.any(np.asarray(p.sigma_x) <= 0.0):
        raise ValueError("bridge_min_inverse requires sigma_x > 0")
    root = _sqrt_discriminant(x, y, np.log(w), p)
    return 0.5 * (x + y - root)
