from __future__ import annotations

import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def scan(rows, q: int) -> bool:
    """Per-coordinate reference: some row shares no set coordinate with q."""
    for x in rows:
        j, clash = 0, False
        while (x >> j) or (q >> j):
            if (x >> j) & 1 and (q >> j) & 1:
                clash = True
                break
            j += 1
        if not clash:
            return True
    return False
