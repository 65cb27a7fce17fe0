"""Named discretisation profiles and the run configuration."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field

from .errors import InvalidParameterError
from .transforms import LogGrid, make_log_grid

ENV_PROFILE = "SONINE_PROFILE"


@dataclass(frozen=True)
class Profile:
    """Grid size plus the width of the guard bands used by subspace builders.

    ``guard_fraction`` is the share of nodes at each end of the window on
    which subspace vectors and their transforms are required to vanish.
    """

    name: str
    L: float
    N: int
    guard_fraction: float = 0.05

    def grid(self) -> LogGrid:
        return make_log_grid(self.L, self.N)


PROFILES = {
    # Nyquist height pi/Delta ~ 1077 and a window reaching e^-7: wide enough
    # that transforms of the Lambda = 2 test functions stay clear of the
    # guard bands.
    "default": Profile("default", 7.0, 4800),
    "fast": Profile("fast", 4.0, 256),
}

_CUSTOM = re.compile(r"custom:(?P<L>[0-9.eE+-]+),(?P<N>\d+)$")


def resolve_profile(name: str | None) -> Profile:
    """Look up a profile by name; ``custom:L,N`` builds an ad hoc one.

    The environment variable SONINE_PROFILE, when set, wins over ``name``.
    """
    chosen = os.environ.get(ENV_PROFILE) or name or "default"
    if chosen in PROFILES:
        return PROFILES[chosen]
    m = _CUSTOM.match(chosen)
    if m:
        L, N = float(m["L"]), int(m["N"])
        make_log_grid(L, N)  # validates
        return Profile(chosen, L, N)
    raise InvalidParameterError(f"unknown profile {chosen!r} (use default, fast or custom:L,N)")


@dataclass
class RunConfig:
    """Everything a CLI run depends on."""

    profile: Profile
    lam: float = 2.0
    tolerances: dict[str, float] = field(default_factory=dict)
    output_dir: str = "out"
    seed: int = 0

    def __post_init__(self) -> None:
        for key, val in self.tolerances.items():
            if not val > 0:
                raise InvalidParameterError(f"tolerance {key} must be positive")
        if not self.lam > 1:
            raise InvalidParameterError("lambda must exceed 1")

    def tol(self, name: str, default: float) -> float:
        return self.tolerances.get(name, default)
