"""Frequency-conversion efficiency versus pump power, and its least-squares fit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .params import DomainError


@dataclass(frozen=True)
class QfcMeasurement:
    pump_power: float
    efficiency: float
    efficiency_uncertainty: Optional[float] = None

    def __post_init__(self):
        if not self.pump_power >= 0:
            raise ValueError(f"pump_power must be non-negative, got {self.pump_power!r}")
        if not 0 <= self.efficiency <= 1:
            raise ValueError(f"efficiency must lie in [0, 1], got {self.efficiency!r}")
        if self.efficiency_uncertainty is not None and not self.efficiency_uncertainty > 0:
            raise ValueError(f"uncertainty must be positive, got {self.efficiency_uncertainty!r}")


@dataclass(frozen=True)
class QfcFit:
    eta: float
    p_m: float
    residual_norm: float
    converged: bool
    iterations: int

    def as_record(self) -> dict:
        return {
            "eta": self.eta,
            "p_m": self.p_m,
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def qfc_efficiency_model(pump_power, eta: float, p_m: float):
    """eta * sin^2((pi/2) sqrt(P / p_m)); accepts scalars or arrays of pump power."""
    if not p_m > 0:
        raise DomainError(f"p_m must be positive, got {p_m!r}")
    if not 0 <= eta <= 1:
        raise DomainError(f"eta must lie in [0, 1], got {eta!r}")
    P = np.asarray(pump_power, dtype=float)
    if np.any(P < 0):
        raise DomainError("pump power must be non-negative")
    out = eta * np.sin(0.5 * np.pi * np.sqrt(P / p_m)) ** 2
    return float(out) if out.ndim == 0 else out


def _basis_and_jac(P, p_m):
    theta = 0.5 * np.pi * np.sqrt(P / p_m)
    s = np.sin(theta)
    basis = s * s
    # d/dp_m of sin^2(theta) with dtheta/dp_m = -theta / (2 p_m)
    d_pm = -np.sin(2 * theta) * theta / (2 * p_m)
    return basis, d_pm


def _profile_eta(P, y, w, p_m):
    basis, _ = _basis_and_jac(P, p_m)
    wb = w * basis
    denom = np.dot(wb, wb)
    if denom == 0:
        return 0.0, np.dot(w * y, w * y)
    eta = np.dot(wb, w * y) / denom
    r = w * (y - eta * basis)
    return eta, np.dot(r, r)


def fit_qfc(
    measurements: Sequence[QfcMeasurement],
    initial_guess: Optional[tuple[float, float]] = None,
    *,
    max_iter: int = 10_000,
    xtol: float = 1e-9,
) -> QfcFit:
    """Fit (eta, p_m) by damped Gauss-Newton (Levenberg-Marquardt).

    Residuals are weighted by 1/uncertainty when every measurement carries
    one. The default guess is the largest observed efficiency and the pump
    power where it occurs. Because sin^2 of sqrt(P) oscillates, the guess for
    p_m is first refined on a log grid spanning a factor of ten either side,
    with eta solved exactly at each grid point, before the iterations start.
    """
    meas = list(measurements)
    if len(meas) < 3:
        raise ValueError(f"need at least 3 measurements, got {len(meas)}")
    P = np.array([m.pump_power for m in meas], dtype=float)
    y = np.array([m.efficiency for m in meas], dtype=float)
    if len(np.unique(P)) < 2:
        raise ValueError("need at least 2 distinct pump powers")
    if all(m.efficiency_uncertainty is not None for m in meas):
        w = 1.0 / np.array([m.efficiency_uncertainty for m in meas], dtype=float)
    else:
        w = np.ones_like(y)

    if initial_guess is None:
        i = int(np.argmax(y))
        eta0, pm0 = float(y[i]), float(P[i])
        if pm0 <= 0:
            pm0 = float(P.max())
    else:
        eta0, pm0 = map(float, initial_guess)
    if not pm0 > 0:
        raise ValueError(f"initial p_m must be positive, got {pm0!r}")

    grid = pm0 * np.logspace(-1, 1, 801)
    sse = np.array([_profile_eta(P, y, w, g)[1] for g in grid])
    pm = float(grid[int(np.argmin(sse))])
    eta = float(_profile_eta(P, y, w, pm)[0]) if np.isfinite(sse.min()) else eta0

    x = np.array([eta, pm])

    def residual(x):
        basis, _ = _basis_and_jac(P, x[1])
        return w * (y - x[0] * basis)

    r = residual(x)
    cost = float(r @ r)
    lam = 1e-3
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        basis, d_pm = _basis_and_jac(P, x[1])
        J = -np.column_stack([w * basis, w * x[0] * d_pm])
        A = J.T @ J
        g = J.T @ r
        diag = np.diag(A).copy()
        diag[diag == 0] = 1.0
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(A + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = x + step
            if trial[1] <= 0:
                lam *= 10
                continue
            r_new = residual(trial)
            cost_new = float(r_new @ r_new)
            if cost_new <= cost:
                accepted = True
                break
            lam *= 10
        if not accepted:
            # no descent direction left: at a minimum to machine precision
            converged = True
            break
        rel = np.max(np.abs(step) / np.maximum(np.abs(trial), 1e-300))
        x, r, cost = trial, r_new, cost_new
        lam = max(lam / 10, 1e-12)
        if rel < xtol:
            converged = True
            break

    return QfcFit(
        eta=float(x[0]),
        p_m=float(x[1]),
        residual_norm=math.sqrt(cost),
        converged=converged,
        iterations=it,
    )
