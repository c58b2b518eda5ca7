"""Case-study presets, config files, rate sweeps, contour grids and crossovers."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import model
from .params import DomainError, NetworkParams, Protocol


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    params: NetworkParams
    description: str = ""


_REGISTRY: dict[str, ScenarioPreset] = {}


def register_preset(name: str, params: NetworkParams, description: str = "",
                    *, overwrite: bool = False) -> ScenarioPreset:
    if name in _REGISTRY and not overwrite:
        raise ValueError(f"preset {name!r} already registered")
    entry = ScenarioPreset(name, params, description)
    _REGISTRY[name] = entry
    return entry


def preset_names() -> list[str]:
    return sorted(_REGISTRY)


def preset(name: str) -> ScenarioPreset:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r} (known: {', '.join(preset_names())})") from None


_TABLE = dict(r_max=2e6, t_nd=1e-6, refractive_index=1.4, p_p=0.06, p_q=0.6,
              p_d=0.8, p_nd=0.75, e_s=1.0, gamma_nd=1.0)

register_preset(
    "ir780",
    NetworkParams(**_TABLE, attenuation=3.0, y=1, n=1, z=0),
    "Ba+ nodes, one conversion stage 493 -> 780 nm, 780 nm fiber at 3 dB/km",
)
register_preset(
    "cband",
    NetworkParams(**_TABLE, attenuation=0.15, y=2, n=1, z=2),
    "Ba+ nodes converted to 780 nm for the flag, then to C-band fiber at 0.15 dB/km;"
    " storage needs a further stage back to 780 nm",
)

PresetLike = Union[str, ScenarioPreset, NetworkParams]


def resolve_params(p: PresetLike) -> NetworkParams:
    if isinstance(p, NetworkParams):
        return p
    if isinstance(p, ScenarioPreset):
        return p.params
    return preset(p).params


# -- config files -------------------------------------------------------------

_INT_KEYS = {"y", "n", "z"}


def _parse_value(key: str, text: str):
    text = text.strip()
    if key == "tau" and text.lower() in ("none", "inf", "infinity", ""):
        return None
    if key in _INT_KEYS:
        return int(text)
    return float(text)


def apply_overrides(params: NetworkParams, assignments: Iterable[str]) -> NetworkParams:
    """Apply ``key=value`` strings to ``params``. Unknown keys raise KeyError."""
    names = set(NetworkParams.field_names())
    changes = {}
    for item in assignments:
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        if key not in names:
            raise KeyError(f"unknown parameter {key!r}")
        try:
            changes[key] = _parse_value(key, value)
        except ValueError:
            raise ValueError(f"bad value for {key}: {value!r}") from None
    return params.replace(**changes) if changes else params


def parse_config(text: str) -> NetworkParams:
    """Parse flat ``key = value`` text. An optional ``preset`` key picks the base values."""
    base_name = None
    items = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "preset":
            base_name = value
        else:
            items.append(f"{key}={value}")
    base = preset(base_name).params if base_name else NetworkParams()
    return apply_overrides(base, items)


def load_config(path: Union[str, os.PathLike]) -> NetworkParams:
    with open(path) as fh:
        return parse_config(fh.read())


def format_config(params: NetworkParams, preset_name: Optional[str] = None) -> str:
    lines = []
    if preset_name:
        lines.append(f"preset = {preset_name}")
    for name in NetworkParams.field_names():
        v = getattr(params, name)
        lines.append(f"{name} = {'none' if v is None else repr(v)}")
    return "\n".join(lines) + "\n"


def save_config(params: NetworkParams, path: Union[str, os.PathLike],
                preset_name: Optional[str] = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_config(params, preset_name))


# -- sweeps ------------------------------------------------------------------


@dataclass(frozen=True)
class GridAxis:
    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("an axis needs at least one step")
        if self.steps > 1 and not self.hi > self.lo:
            raise ValueError(f"axis {self.name}: need hi > lo, got [{self.lo}, {self.hi}]")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


def _increasing(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(arr) <= 0):
        raise ValueError("grid points must be strictly increasing")
    return arr


@dataclass(frozen=True)
class SweepSpec:
    preset: PresetLike
    lengths: Union[Sequence[float], GridAxis]
    protocols: tuple[Protocol, ...] = tuple(Protocol)

    def __post_init__(self):
        object.__setattr__(self, "protocols", tuple(Protocol.parse(p) for p in self.protocols))
        if not self.protocols:
            raise ValueError("at least one protocol is required")

    def length_grid(self) -> np.ndarray:
        if isinstance(self.lengths, GridAxis):
            return _increasing(self.lengths.values())
        return _increasing(self.lengths)


@dataclass(frozen=True)
class RatePoint:
    length_km: float
    protocol: Protocol
    rate_hz: float
    derived: model.DerivedQuantities = field(repr=False)


def sweep_rates(spec: SweepSpec) -> list[RatePoint]:
    """Analytic rates at every (length, protocol); ordered by length, then protocol."""
    params = resolve_params(spec.preset)
    out = []
    for L in spec.length_grid():
        L = float(L)
        try:
            derived = model.derived_quantities(L, params)
        except DomainError as exc:
            raise DomainError(f"at length {L} km: {exc}") from exc
        for proto in spec.protocols:
            try:
                r = model.rate(L, params, proto)
            except DomainError as exc:
                raise DomainError(f"at length {L} km, protocol {proto.value}: {exc}") from exc
            out.append(RatePoint(L, proto, r, derived))
    return out


def default_axis() -> np.ndarray:
    return np.linspace(0.0, 1.0, 101)


def contour_grid(preset: PresetLike, length_km: float,
                 es_axis=None, pnd_axis=None) -> np.ndarray:
    """Ratio of the storage-assisted rate to the homogeneous rate over (E_s, P_nd).

    Rows follow ``es_axis``, columns ``pnd_axis`` (both default to 101 points
    on [0, 1]). Cells where the flag probability vanishes are NaN.
    """
    params = resolve_params(preset)
    es = default_axis() if es_axis is None else np.asarray(es_axis, dtype=float)
    pnd = default_axis() if pnd_axis is None else np.asarray(pnd_axis, dtype=float)
    for name, ax in (("E_s", es), ("P_nd", pnd)):
        if ax.ndim != 1 or ax.size == 0 or np.any((ax < 0) | (ax > 1)):
            raise ValueError(f"{name} axis must be a non-empty 1-d grid within [0, 1]")
    base = model.rate_base(length_km, params)
    grid = np.full((es.size, pnd.size), np.nan)
    for i, e in enumerate(es):
        for j, d in enumerate(pnd):
            varied = params.replace(e_s=float(e), p_nd=float(d))
            try:
                grid[i, j] = model.rate_storage(length_km, varied) / base
            except DomainError:
                pass
    return grid


def find_crossover(preset_a: PresetLike, protocol_a, preset_b: PresetLike, protocol_b,
                   l_min: float, l_max: float, *, tol_km: float = 1e-3) -> float:
    """Length where rate A equals rate B, by bisection on log(A) - log(B).

    The bracket must contain a sign change; the result is within ``tol_km``.
    """
    pa, pb = resolve_params(preset_a), resolve_params(preset_b)
    proto_a, proto_b = Protocol.parse(protocol_a), Protocol.parse(protocol_b)

    def diff(L):
        ra, rb = model.rate(L, pa, proto_a), model.rate(L, pb, proto_b)
        if ra <= 0 or rb <= 0:
            raise DomainError(f"rate vanishes at {L} km; log-ratio undefined")
        return math.log(ra) - math.log(rb)

    if not 0 <= l_min < l_max:
        raise ValueError(f"need 0 <= l_min < l_max, got [{l_min}, {l_max}]")
    lo, hi = float(l_min), float(l_max)
    f_lo, f_hi = diff(lo), diff(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError(
            f"no sign change of rate difference on [{l_min}, {l_max}] km "
            f"(log-ratio {f_lo:+.3g} and {f_hi:+.3g})")
    while hi - lo > tol_km:
        mid = 0.5 * (lo + hi)
        f_mid = diff(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
