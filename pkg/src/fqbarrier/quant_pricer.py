"""Barrier pricing on the quantized chain by forward induction.

Every transition probability is damped by the survival factor of the
barrier over that interval (the bridge extremum law between the two grid
points), giving the sub-stochastic kernels

    H_k[i, j] = g(x_{k-1,i}, x_{k,j}) p_k[i, j],

with g the per-interval no-knock-out probability: G_{x,y}(L) for an
up-and-out contract, 1 - F_{x,y}(L) for a down-and-out one.  Pushing the
initial point mass through the kernels yields a sub-probability measure on
the terminal grid whose total mass is the survival probability; discounting
the expected payoff under it prices the option.  The measure does not
depend on the payoff, so call and put come from a single induction pass.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .bridge import BridgeParams, bridge_max_cdf, bridge_min_cdf
from .brownian import brownian_product_quantizer
from .contracts import BarrierContract, BarrierType, PayoffType, PricingResult
from .models import Model
from .price_grid import QuantizedPriceGrid, quantize_price_process
from .transitions import TransitionMatrix, transition_matrices

__all__ = [
    "QuantizedMeasure",
    "quantized_kernel",
    "forward_induction",
    "prune_knocked_rows",
    "knockout_survival_measure",
    "price_barrier",
    "price_barrier_both",
    "price_barrier_quant",
]


@dataclass(frozen=True)
class QuantizedMeasure:
    """Sub-probability masses over the grid ranks at one date."""

    step: int
    values: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.values.sum())


def survival_factors(grid_prev, grid_next, contract: BarrierContract, params: BridgeParams) -> np.ndarray:
    """Per-interval no-knock-out probability for every source/target pair.

    ``params.sigma_x`` must hold the diffusion at the source grid points,
    shaped to broadcast down the rows.
    """
    gp = np.asarray(grid_prev, dtype=float)[:, None]
    gn = np.asarray(grid_next, dtype=float)[None, :]
    if contract.barrier_type is BarrierType.UP_AND_OUT:
        return bridge_max_cdf(gp, gn, contract.barrier, params)
    return 1.0 - bridge_min_cdf(gp, gn, contract.barrier, params)


def quantized_kernel(
    grid_prev,
    grid_next,
    transition: TransitionMatrix,
    contract: BarrierContract,
    model: Model,
    params: BridgeParams,
) -> np.ndarray:
    """Entrywise product of the transition row and the barrier survival factor.

    ``params.sigma_x`` carries the diffusion of ``model`` at the source
    grid points (column-shaped so it broadcasts down the rows).
    """
    gp = np.asarray(grid_prev, dtype=float)
    gn = np.asarray(grid_next, dtype=float)
    if transition.entries.shape != (gp.size, gn.size):
        raise ValueError("transition matrix shape does not match the grids")
    return survival_factors(gp, gn, contract, params) * transition.entries


def forward_induction(kernels: list[np.ndarray], x0_cell: int) -> QuantizedMeasure:
    """Propagate a unit mass at the initial cell through the kernels."""
    if not kernels:
        raise ValueError("need at least one kernel")
    rows = kernels[0].shape[0]
    if not 0 <= x0_cell < rows:
        raise ValueError("x0_cell outside the first kernel's rows")
    pi = np.zeros(rows)
    pi[x0_cell] = 1.0
    for k, H in enumerate(kernels):
        if H.shape[0] != pi.size:
            raise ValueError(f"kernel {k} has {H.shape[0]} rows, expected {pi.size}")
        pi = pi @ H
    return QuantizedMeasure(len(kernels), pi)


def prune_knocked_rows(
    kernels: list[np.ndarray],
    grids,
    contract: BarrierContract,
) -> list[np.ndarray]:
    """Zero the kernel rows whose source point sits beyond the barrier.

    Those rows are already structurally zero (the survival factor kills
    them), so the pruned kernels reproduce the unpruned computation
    bit for bit; skipping them in the induction is pure bookkeeping.
    """
    out = []
    up = contract.barrier_type is BarrierType.UP_AND_OUT
    for k, H in enumerate(kernels):
        source = np.asarray(grids[k], dtype=float)
        knocked = source > contract.barrier if up else source < contract.barrier
        if np.any(knocked):
            H = H.copy()
            H[knocked, :] = 0.0
        out.append(H)
    return out


def _build_kernels(
    model: Model,
    contract: BarrierContract,
    grid: QuantizedPriceGrid,
    matrices: list[TransitionMatrix],
) -> list[np.ndarray]:
    kernels = []
    for k, tm in enumerate(matrices):
        gp = grid.grids[k]
        params = BridgeParams(grid.n_steps, grid.horizon, np.asarray(model.diffusion(gp))[:, None])
        kernels.append(quantized_kernel(gp, grid.grids[k + 1], tm, contract, model, params))
    return prune_knocked_rows(kernels, grid.grids, contract)


def knockout_survival_measure(
    model: Model,
    contract: BarrierContract,
    grid: QuantizedPriceGrid,
    matrices: list[TransitionMatrix],
) -> QuantizedMeasure:
    """Terminal sub-probability measure of the no-knock-out event."""
    if len(matrices) != grid.n_steps:
        raise ValueError("need exactly one transition matrix per pricing step")
    kernels = _build_kernels(model, contract, grid, matrices)
    return forward_induction(kernels, grid.x0_cell)


def price_barrier_both(
    model: Model,
    contract: BarrierContract,
    grid: QuantizedPriceGrid,
    matrices: list[TransitionMatrix],
) -> tuple[float, float]:
    """Discounted call and put prices from a single induction pass."""
    measure = knockout_survival_measure(model, contract, grid, matrices)
    terminal = grid.grids[grid.n_steps]
    disc = np.exp(-model.r * contract.maturity)
    call = disc * float(measure.values @ np.maximum(terminal - contract.strike, 0.0))
    put = disc * float(measure.values @ np.maximum(contract.strike - terminal, 0.0))
    return call, put


def price_barrier(
    model: Model,
    contract: BarrierContract,
    grid: QuantizedPriceGrid,
    matrices: list[TransitionMatrix],
) -> PricingResult:
    """Price the contract's payoff on prebuilt grids and transition matrices."""
    start = time.perf_counter()
    call, put = price_barrier_both(model, contract, grid, matrices)
    price = call if contract.payoff_type is PayoffType.CALL else put
    return PricingResult(price=price, method="quant", elapsed=time.perf_counter() - start)


def price_barrier_quant(
    model: Model,
    contract: BarrierContract,
    n_steps: int,
    budget: int = 1000,
    substeps: int = 4,
    cdf_mode: str | None = None,
) -> PricingResult:
    """End-to-end quantization price: build paths, grids, kernels, induct.

    ``cdf_mode=None`` picks the exact conditional law when the model has
    one and the Euler proxy otherwise.
    """
    start = time.perf_counter()
    quantizer = brownian_product_quantizer(budget, contract.maturity)
    grid = quantize_price_process(model, quantizer, n_steps, substeps)
    matrices = transition_matrices(model, grid, cdf_mode)
    result = price_barrier(model, contract, grid, matrices)
    result.elapsed = time.perf_counter() - start
    return result
