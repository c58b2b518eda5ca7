"""Closed-form entanglement rates for the three network configurations.

Every length is the per-arm fiber length in km (node to Bell-state analyzer).
A symmetric network therefore spans ``2 * length_km`` node to node.

Functions that depend on the one-way travel time accept an optional ``t_n``
keyword (seconds) overriding ``travel_time(length_km, params)``. The
Monte Carlo oracle uses it to feed in cycle-rounded delays; fiber loss is
still evaluated at ``length_km``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .params import SPEED_OF_LIGHT, DomainError, NetworkParams, Protocol


def _check_length(length_km: float) -> None:
    if not length_km >= 0:
        raise DomainError(f"length must be non-negative, got {length_km!r}")


def _tn(length_km: float, params: NetworkParams, t_n: Optional[float]) -> float:
    if t_n is None:
        return travel_time(length_km, params)
    if not t_n >= 0:
        raise DomainError(f"travel time must be non-negative, got {t_n!r}")
    return t_n


def travel_time(length_km: float, params: NetworkParams) -> float:
    """One-way transit time through ``length_km`` of fiber, in seconds."""
    _check_length(length_km)
    return params.refractive_index * length_km * 1e3 / SPEED_OF_LIGHT


def fiber_transmission(length_km: float, attenuation_db_per_km: float) -> float:
    _check_length(length_km)
    if not attenuation_db_per_km >= 0:
        raise DomainError(f"attenuation must be non-negative, got {attenuation_db_per_km!r}")
    return 10.0 ** (-attenuation_db_per_km * length_km / 10.0)


def request_rate_base(length_km: float, params: NetworkParams, *, t_n: Optional[float] = None) -> float:
    """Synchronized photon request rate of the homogeneous network."""
    tn = _tn(length_km, params, t_n)
    if tn == 0:
        return params.r_max
    return min(params.r_max, 1.0 / (2.0 * tn))


def p_bsa(length_km: float, params: NetworkParams) -> float:
    """Probability that a requested photon is detected at the analyzer."""
    return (params.p_p * params.p_q**params.y
            * fiber_transmission(length_km, params.attenuation) * params.p_d)


def rate_base(length_km: float, params: NetworkParams, *, t_n: Optional[float] = None) -> float:
    return 0.5 * request_rate_base(length_km, params, t_n=t_n) * p_bsa(length_km, params) ** 2


def p_flag(params: NetworkParams) -> float:
    """Per-request probability that the nondestructive detector flags a photon."""
    return params.p_p * params.p_q**params.n * params.p_nd


def cycle_period(params: NetworkParams) -> float:
    """Photon request period once a flag response is awaited: 1/r_max + t_nd."""
    return 1.0 / params.r_max + params.t_nd


def _require_flag(params: NetworkParams) -> float:
    p = p_flag(params)
    if p <= 0:
        raise DomainError("flag probability is zero (p_p, p_q**n or p_nd vanishes)")
    return p


def request_rate_ndspm(length_km: float, params: NetworkParams, *, t_n: Optional[float] = None) -> float:
    tn = _tn(length_km, params, t_n)
    p = p_flag(params)
    T = cycle_period(params)
    denom = p * 2.0 * tn + (1.0 - p) * T
    if denom <= 0:
        raise DomainError("request period vanishes (p = 1 at zero length or p = 0 with T = 0)")
    return 1.0 / denom


def alpha(length_km: float, params: NetworkParams, *, t_n: Optional[float] = None) -> float:
    """Probability that both nodes are attempting in the same cycle."""
    p = _require_flag(params)
    tn = _tn(length_km, params, t_n)
    attempt_time = cycle_period(params) / p
    return attempt_time / (attempt_time + 2.0 * tn)


def rate_ndspm(length_km: float, params: NetworkParams, *, t_n: Optional[float] = None) -> float:
    # Taken literally: p_bsa already contains p_p * p_q**y even though p_flag
    # carries p_p * p_q**n as well.
    a = alpha(length_km, params, t_n=t_n)
    r = request_rate_ndspm(length_km, params, t_n=t_n)
    detected = params.p_nd * params.gamma_nd * p_bsa(length_km, params)
    return a * r * detected**2 / 2.0


def expected_max_geometric(p: float) -> float:
    """Mean of max(X1, X2) for independent geometric(p) trials on {1, 2, ...}."""
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p!r}")
    return (3.0 - 2.0 * p) / (p * (2.0 - p))


def t_star(length_km: float, params: NetworkParams, *, t_n: Optional[float] = None) -> float:
    """Mean time between storage-assisted entanglement attempts."""
    p = _require_flag(params)
    tn = _tn(length_km, params, t_n)
    T = cycle_period(params)
    return T * (2.0 * p - 3.0) / (p * (p - 2.0)) + 2.0 * tn


def rate_storage(length_km: float, params: NetworkParams, *, t_n: Optional[float] = None) -> float:
    r_star = 1.0 / t_star(length_km, params, t_n=t_n)
    arrived = (fiber_transmission(length_km, params.attenuation) * params.gamma_nd
               * params.e_s * params.p_q**params.z * params.p_d)
    return r_star * arrived**2 / 2.0


def beta(params: NetworkParams) -> float:
    """Finite-storage penalty on the storage-assisted rate.

    Exactly 1.0 when ``params.tau`` is None.
    """
    p = _require_flag(params)
    if params.tau is None:
        return 1.0
    x = cycle_period(params) / params.tau
    if x > 700:
        # e**x overflows; the expression tends to p / (2 - p)
        return p / (2.0 - p)
    g = math.expm1(x)  # e**x - 1, kept exact for tiny T/tau
    return p * (2.0 + g - p) / ((2.0 - p) * (g + p))


def rate_storage_finite(length_km: float, params: NetworkParams, *, t_n: Optional[float] = None) -> float:
    base = rate_storage(length_km, params, t_n=t_n)
    if params.tau is None:
        return base
    return beta(params) * base


def delay_distribution(p: float, M: int, direction: str = "after") -> float:
    """Probability that the second node flags ``M`` cycles after (or before) the first.

    Both directions share the form p (1-p)**M / (2-p). "after" is defined for
    M >= 0, "before" for M >= 1, so that the two together sum to one.
    """
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p!r}")
    if int(M) != M:
        raise DomainError(f"M must be an integer, got {M!r}")
    M = int(M)
    if direction == "after":
        if M < 0:
            raise DomainError("'after' delays start at M = 0")
    elif direction == "before":
        if M < 1:
            raise DomainError("'before' delays start at M = 1")
    else:
        raise DomainError(f"direction must be 'after' or 'before', got {direction!r}")
    return p * (1.0 - p) ** M / (2.0 - p)


def asymptotic_ratio(params: NetworkParams, protocol=Protocol.NDSPM_STORAGE) -> float:
    """Long-distance limit of rate(protocol) / rate_base.

    The flag-only protocol loses to the homogeneous network at large length,
    so its limit is zero.
    """
    protocol = Protocol.parse(protocol)
    if protocol is Protocol.BASELINE:
        return 1.0
    if protocol is Protocol.NDSPM:
        return 0.0
    if params.p_p == 0:
        raise DomainError("p_p = 0: the homogeneous rate vanishes")
    if params.p_q == 0 and params.y > params.z:
        raise DomainError("p_q = 0 with y > z: the homogeneous rate vanishes")
    if params.p_q == 0 and params.z > params.y:
        return 0.0
    stages = params.z - params.y
    return (params.gamma_nd * params.e_s * params.p_q**stages / params.p_p) ** 2


def ndspm_breakeven_length(params: NetworkParams) -> float:
    """Length (km) beyond which the flag-only network underperforms the homogeneous one.

    Solves t_n(L) = p_nd**2 T / (2 p**2). The condition is an order-of-magnitude
    estimate, not an exact crossing.
    """
    p = _require_flag(params)
    tn = params.p_nd**2 * cycle_period(params) / (2.0 * p**2)
    return tn * SPEED_OF_LIGHT / (params.refractive_index * 1e3)


@dataclass(frozen=True)
class DerivedQuantities:
    t_n: float
    p_f: float
    p_b: float
    p_flag: float
    cycle_period: float
    alpha: Optional[float]
    t_star: Optional[float]
    beta: Optional[float]


def derived_quantities(length_km: float, params: NetworkParams) -> DerivedQuantities:
    """Intermediate quantities at one length; flag-dependent ones are None when p = 0."""
    p = p_flag(params)
    has_flag = p > 0
    return DerivedQuantities(
        t_n=travel_time(length_km, params),
        p_f=fiber_transmission(length_km, params.attenuation),
        p_b=p_bsa(length_km, params),
        p_flag=p,
        cycle_period=cycle_period(params),
        alpha=alpha(length_km, params) if has_flag else None,
        t_star=t_star(length_km, params) if has_flag else None,
        beta=beta(params) if has_flag else None,
    )


def rate(length_km: float, params: NetworkParams, protocol, *, t_n: Optional[float] = None) -> float:
    """Analytic rate for ``protocol``; the storage protocol includes the lifetime penalty."""
    protocol = Protocol.parse(protocol)
    if protocol is Protocol.BASELINE:
        return rate_base(length_km, params, t_n=t_n)
    if protocol is Protocol.NDSPM:
        return rate_ndspm(length_km, params, t_n=t_n)
    return rate_storage_finite(length_km, params, t_n=t_n)
