"""Wall-clock budget threaded through long-running loops."""

from __future__ import annotations

import time

from recsynth.errors import SynthesisTimeout


class Deadline:
    __slots__ = ("t_end",)

    def __init__(self, seconds: float | None):
        self.t_end = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.t_end is not None and time.monotonic() > self.t_end:
            raise SynthesisTimeout("budget exhausted")

    def expired(self) -> bool:
        return self.t_end is not None and time.monotonic() > self.t_end

    def remaining(self) -> float | None:
        if self.t_end is None:
            return None
        return max(0.0, self.t_end - time.monotonic())


NO_DEADLINE = Deadline(None)
