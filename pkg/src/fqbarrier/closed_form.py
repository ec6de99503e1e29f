"""Black-Scholes closed forms: vanilla options and continuously monitored
knock-out barriers via the reflection (image) decomposition.

The barrier formulas follow the standard four-block decomposition (the
Reiner-Rubinstein building terms A, B, C, D with zero rebate); which blocks
combine depends on the barrier side and on whether the strike sits above
or below the barrier.
"""

from __future__ import annotations

import math
import time

from scipy.special import ndtr

from .contracts import BarrierContract, BarrierType, PayoffType, PricingResult
from .models import BlackScholes

__all__ = ["vanilla_price", "barrier_price", "price_closed_form"]


def vanilla_price(x0: float, strike: float, maturity: float, rate: float, sigma: float, payoff_type: PayoffType) -> float:
    """Plain Black-Scholes call/put price."""
    if sigma <= 0.0 or maturity <= 0.0:
        raise ValueError("sigma and maturity must be positive")
    if x0 <= 0.0 or strike <= 0.0:
        raise ValueError("x0 and strike must be positive")
    srt = sigma * math.sqrt(maturity)
    d1 = (math.log(x0 / strike) + (rate + 0.5 * sigma**2) * maturity) / srt
    d2 = d1 - srt
    disc = math.exp(-rate * maturity)
    if payoff_type is PayoffType.CALL:
        return x0 * ndtr(d1) - strike * disc * ndtr(d2)
    return strike * disc * ndtr(-d2) - x0 * ndtr(-d1)


def _blocks(x0, strike, barrier, maturity, rate, sigma, phi, eta):
    """The four reflection building blocks for a zero-rebate barrier option."""
    srt = sigma * math.sqrt(maturity)
    mu = rate / sigma**2 - 0.5
    disc = math.exp(-rate * maturity)
    ratio = barrier / x0

    x1 = math.log(x0 / strike) / srt + (1.0 + mu) * srt
    x2 = math.log(x0 / barrier) / srt + (1.0 + mu) * srt
    y1 = math.log(barrier**2 / (x0 * strike)) / srt + (1.0 + mu) * srt
    y2 = math.log(barrier / x0) / srt + (1.0 + mu) * srt

    A = phi * x0 * ndtr(phi * x1) - phi * strike * disc * ndtr(phi * (x1 - srt))
    B = phi * x0 * ndtr(phi * x2) - phi * strike * disc * ndtr(phi * (x2 - srt))
    C = phi * x0 * ratio ** (2.0 * mu + 2.0) * ndtr(eta * y1) - phi * strike * disc * ratio ** (
        2.0 * mu
    ) * ndtr(eta * (y1 - srt))
    D = phi * x0 * ratio ** (2.0 * mu + 2.0) * ndtr(eta * y2) - phi * strike * disc * ratio ** (
        2.0 * mu
    ) * ndtr(eta * (y2 - srt))
    return A, B, C, D


def barrier_price(
    x0: float,
    strike: float,
    barrier: float,
    maturity: float,
    rate: float,
    sigma: float,
    barrier_type: BarrierType,
    payoff_type: PayoffType,
) -> float:
    """Continuously monitored knock-out price under Black-Scholes."""
    if barrier <= 0.0:
        raise ValueError("barrier must be positive")
    if sigma <= 0.0 or maturity <= 0.0:
        raise ValueError("sigma and maturity must be positive")
    if x0 <= 0.0 or strike <= 0.0:
        raise ValueError("x0 and strike must be positive")

    up = barrier_type is BarrierType.UP_AND_OUT
    if up and x0 >= barrier:
        return 0.0
    if not up and x0 <= barrier:
        return 0.0

    call = payoff_type is PayoffType.CALL
    phi = 1.0 if call else -1.0
    eta = -1.0 if up else 1.0
    strike_above = strike > barrier

    if up and call:
        if strike >= barrier:
            return 0.0  # any in-the-money fixing would have crossed first
        A, B, C, D = _blocks(x0, strike, barrier, maturity, rate, sigma, phi, eta)
        return A - B + C - D
    if up and not call:
        A, B, C, D = _blocks(x0, strike, barrier, maturity, rate, sigma, phi, eta)
        return B - D if strike_above else A - C
    if not up and call:
        A, B, C, D = _blocks(x0, strike, barrier, maturity, rate, sigma, phi, eta)
        return A - C if strike_above else B - D
    # down-and-out put
    if strike <= barrier:
        return 0.0
    A, B, C, D = _blocks(x0, strike, barrier, maturity, rate, sigma, phi, eta)
    return A - B + C - D


def price_closed_form(model: BlackScholes, contract: BarrierContract) -> PricingResult:
    """Closed-form knock-out price for a model/contract pair."""
    if not isinstance(model, BlackScholes):
        raise ValueError("closed form unavailable for pseudo-CEV")
    start = time.perf_counter()
    price = barrier_price(
        model.x0,
        contract.strike,
        contract.barrier,
        contract.maturity,
        model.r,
        model.sigma,
        contract.barrier_type,
        contract.payoff_type,
    )
    return PricingResult(price=price, method="closed", elapsed=time.perf_counter() - start)
