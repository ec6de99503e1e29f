import numpy as np
import pytest

from fqbarrier import (
    BlackScholes,
    PseudoCEV,
    brownian_product_quantizer,
    quantize_price_process,
    transition_matrices,
)

BS07 = BlackScholes(r=0.15, sigma=0.07, x0=100.0)
BS10 = BlackScholes(r=0.15, sigma=0.10, x0=100.0)
PCEV07 = PseudoCEV(r=0.15, vartheta=0.7, delta=0.5, x0=100.0)
PCEV10 = PseudoCEV(r=0.15, vartheta=1.0, delta=0.5, x0=100.0)


@pytest.fixture(scope="session")
def bs_model():
    return BS07


@pytest.fixture(scope="session")
def bq966():
    return brownian_product_quantizer(1000, 1.0)


@pytest.fixture(scope="session")
def quant_pipeline(bq966):
    """Factory for (grid, matrices) pairs, cached per configuration."""
    cache = {}

    def build(model, n_steps, substeps=4, cdf_mode=None):
        key = (model, n_steps, substeps, cdf_mode)
        if key not in cache:
            grid = quantize_price_process(model, bq966, n_steps, substeps)
            cache[key] = (grid, transition_matrices(model, grid, cdf_mode))
        return cache[key]

    return build


@pytest.fixture()
def rng():
    return np.random.default_rng(20250810)
