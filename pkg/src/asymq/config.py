"""Central tolerance set shared by every module and campaign."""
from __future__ import annotations

from dataclasses import dataclass, replace

MAX_ENTRIES = 4096


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10
    psd_floor: float = -1e-10
    trace: float = 1e-10
    norm: float = 1e-10
    reconstruction: float = 1e-9
    trace_preserving: float = 1e-9
    probability_floor: float = 1e-12
    spectra: float = 1e-8
    rank: float = 1e-8


DEFAULT = Tolerances()
STRICT = replace(
    DEFAULT,
    hermiticity=1e-12,
    psd_floor=-1e-12,
    trace=1e-12,
    norm=1e-12,
    reconstruction=1e-11,
    trace_preserving=1e-11,
)

PROFILES = {"default": DEFAULT, "strict": STRICT}

_active = DEFAULT


def active() -> Tolerances:
    return _active


def set_profile(name: str) -> Tolerances:
    global _active
    try:
        _active = PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}") from None
    return _active
