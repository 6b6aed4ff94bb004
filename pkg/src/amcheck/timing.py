"""Cooperative wall-clock deadlines for long-running checks."""

from __future__ import annotations

import time

from .errors import CheckTimeout


class Deadline:
    """A wall-clock budget that computations poll at loop boundaries.

    Nothing is interrupted preemptively; engines call check() at natural
    iteration points, so expiry is detected within one loop body.
    """

    def __init__(self, seconds: float):
        self.expires = time.perf_counter() + seconds

    def check(self) -> None:
        if time.perf_counter() > self.expires:
            raise CheckTimeout("deadline exceeded")
