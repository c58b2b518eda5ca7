"""Entanglement rates for trapped-ion networks with photon flagging and storage.

Closed-form rates live in :mod:`hybridrate.model`, the cycle-level Monte Carlo
in :mod:`hybridrate.simulator`, the conversion-efficiency fit in
:mod:`hybridrate.qfc` and the case-study presets and sweeps in
:mod:`hybridrate.scenarios`.
"""

from .params import SPEED_OF_LIGHT, DomainError, NetworkParams, Protocol
from .model import (
    alpha,
    asymptotic_ratio,
    beta,
    cycle_period,
    delay_distribution,
    derived_quantities,
    fiber_transmission,
    ndspm_breakeven_length,
    p_bsa,
    p_flag,
    rate,
    rate_base,
    rate_ndspm,
    rate_storage,
    rate_storage_finite,
    request_rate_base,
    request_rate_ndspm,
    t_star,
    travel_time,
)
from .qfc import QfcFit, QfcMeasurement, fit_qfc, qfc_efficiency_model
from .scenarios import (
    GridAxis,
    RatePoint,
    ScenarioPreset,
    SweepSpec,
    contour_grid,
    find_crossover,
    load_config,
    preset,
    register_preset,
    save_config,
    sweep_rates,
)
from .simulator import SimConfig, SimResult, analytic_rate, run_batch, run_simulation

__version__ = "0.1.0"
