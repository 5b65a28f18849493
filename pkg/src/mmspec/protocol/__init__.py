"""End-to-end trace-estimation experiments producing time series."""
from .hadamard import (
    NoiseSchedule,
    Shots,
    Trotter,
    evolved_state,
    hadamard_test_point,
    pointer_expectations,
    run_hadamard_series,
)
from .lifetime import mms_lifetime_experiment
from .series import TimeSeries, check_uniform, derive_seed, rng_for, uniform_grid
from .stochastic import (
    Euler,
    StochasticResult,
    StochasticSample,
    run_stochastic_series,
    stochastic_state,
)

__all__ = [
    "Euler", "NoiseSchedule", "Shots", "StochasticResult", "StochasticSample", "TimeSeries",
    "Trotter", "check_uniform", "derive_seed", "evolved_state", "hadamard_test_point",
    "mms_lifetime_experiment", "pointer_expectations", "rng_for", "run_hadamard_series",
    "run_stochastic_series", "stochastic_state", "uniform_grid",
]
