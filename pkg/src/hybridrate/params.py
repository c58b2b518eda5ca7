"""Network parameter container and protocol identifiers."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a rate expression."""


class Protocol(str, enum.Enum):
    BASELINE = "baseline"
    NDSPM = "ndspm"
    NDSPM_STORAGE = "ndspm_storage"

    @classmethod
    def parse(cls, value) -> "Protocol":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_").replace("+", "_")
        aliases = {"base": "baseline", "storage": "ndspm_storage"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(p.value for p in cls)
            raise ValueError(f"unknown protocol {value!r} (expected one of: {names})") from None


_PROBABILITIES = ("p_p", "p_q", "p_d", "p_nd", "e_s", "gamma_nd")
_COUNTS = ("y", "n", "z")


@dataclass(frozen=True)
class NetworkParams:
    """Physical and protocol parameters of a symmetric two-node network.

    Times are in seconds, rates in Hz, attenuation in dB/km. ``tau`` is the
    1/e lifetime of the photonic storage; ``None`` means storage never decays.
    """

    r_max: float = 2e6
    t_nd: float = 1e-6
    refractive_index: float = 1.4
    attenuation: float = 3.0
    p_p: float = 0.06
    p_q: float = 0.6
    p_d: float = 0.8
    p_nd: float = 0.75
    e_s: float = 1.0
    gamma_nd: float = 1.0
    y: int = 1
    n: int = 1
    z: int = 0
    tau: Optional[float] = None

    def __post_init__(self):
        for name in _PROBABILITIES:
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if not self.r_max > 0:
            raise ValueError(f"r_max must be positive, got {self.r_max!r}")
        if not self.t_nd >= 0:
            raise ValueError(f"t_nd must be non-negative, got {self.t_nd!r}")
        if not (self.attenuation >= 0 and math.isfinite(self.attenuation)):
            raise ValueError(f"attenuation must be finite and non-negative, got {self.attenuation!r}")
        if not self.refractive_index >= 1:
            raise ValueError(f"refractive_index must be >= 1, got {self.refractive_index!r}")
        for name in _COUNTS:
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n > self.y:
            raise ValueError(f"n ({self.n}) cannot exceed y ({self.y})")
        if self.tau is not None and not self.tau > 0:
            raise ValueError(f"tau must be positive when given, got {self.tau!r}")

    def replace(self, **changes) -> "NetworkParams":
        return dataclasses.replace(self, **changes)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))
