"""Scaling and correlation analysis of sampled time series."""

import json

from ._core import (
    TsscaleError,
    __version__,
    dfa,
    generate,
    increments,
    lpsd,
    mag_sign,
    pearson,
    scaling_exponent,
    ssa,
    surrogate,
)
from . import _core

__all__ = [
    "TsscaleError",
    "__version__",
    "dfa",
    "generate",
    "increments",
    "lpsd",
    "mag_sign",
    "pearson",
    "rank_distributions",
    "run_pipeline",
    "scaling_exponent",
    "spectral_exponent",
    "ssa",
    "surrogate",
    "surrogate_test",
]


def spectral_exponent(values, f_lo, f_hi, dt=1.0):
    """LPSD of ``values`` and the fitted 1/f^beta law over [f_lo, f_hi]."""
    return json.loads(_core.spectral_exponent_json(values, f_lo, f_hi, dt))


def rank_distributions(values, bins=None):
    """Weibull, Gamma and GEV fits ordered by KL divergence (nats)."""
    return json.loads(_core.rank_distributions_json(values, bins))


def surrogate_test(increments, count=100, seed=0, window=(300.0, 9070.0)):
    """Magnitude/sign DFA exponents of ``increments`` against a surrogate ensemble."""
    return json.loads(_core.surrogate_test_json(increments, count, seed, window[0], window[1]))


def run_pipeline(config, output=None, seed=None):
    """Runs the full pipeline described by an INI file and returns the report."""
    return json.loads(_core.run_pipeline_json(str(config), None if output is None else str(output), seed))
