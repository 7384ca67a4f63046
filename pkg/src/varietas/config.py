"""Window and stage limits, overridable via ``VARIETAS_LIMITS``.

The environment variable holds comma-separated ``key=value`` pairs, e.g.
``VARIETAS_LIMITS="time=16,space=16,stages=3,horizon=6"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Limits:
    time_window: int = 32
    space_window: int = 32
    stage_bound: int = 4
    bt_horizon: int = 8

    def scaled_for_tests(self) -> "Limits":
        return replace(self, time_window=8, space_window=8)


_KEYS = {
    "time": "time_window",
    "space": "space_window",
    "stages": "stage_bound",
    "horizon": "bt_horizon",
}


def load_limits(env: str | None = None) -> Limits:
    raw = os.environ.get("VARIETAS_LIMITS", "") if env is None else env
    limits = Limits()
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad VARIETAS_LIMITS entry {part!r}")
        key, value = part.split("=", 1)
        field = _KEYS.get(key.strip())
        if field is None:
            raise ValueError(f"unknown VARIETAS_LIMITS key {key!r}")
        limits = replace(limits, **{field: int(value)})
    return limits
