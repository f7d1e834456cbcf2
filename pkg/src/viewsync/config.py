"""System parameters and timeout families."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .sim import ConfigError, Time, as_time, norm

FAMILIES = ("linear", "exponential", "constant")


@dataclass(frozen=True)
class TimeoutFn:
    """A view-indexed duration: ``linear`` c*v, ``exponential`` c*2^(v-1), ``constant`` c.

    Linear and exponential give 0 at view 0, as the view timeout requires.
    """

    family: str
    c: Time

    def __post_init__(self):
        object.__setattr__(self, "c", as_time(self.c))

    def __call__(self, v: int) -> Time:
        if v < 0:
            raise ValueError(f"negative view {v}")
        if self.family == "linear":
            return norm(self.c * v)
        if self.family == "exponential":
            return 0 if v == 0 else norm(self.c * 2 ** (v - 1))
        if self.family == "constant":
            return self.c
        raise ConfigError(f"unknown timeout family {self.family!r}")

    def problems(self, main: bool) -> list[str]:
        out = []
        if self.family not in FAMILIES:
            out.append(f"unknown timeout family {self.family!r}")
        if self.c <= 0:
            out.append(f"timeout constant must be positive, got {self.c}")
        if main and self.family == "constant":
            out.append("view timeout must be non-decreasing, zero at view 0 and unbounded "
                       "(use linear or exponential)")
        return out

    def to_dict(self) -> dict:
        from .sim import fmt_time
        return {"family": self.family, "c": fmt_time(self.c)}

    @classmethod
    def from_dict(cls, d) -> "TimeoutFn":
        if isinstance(d, TimeoutFn):
            return d
        return cls(d["family"], d["c"])

    def __str__(self):
        return {"linear": f"{self.c}*v", "exponential": f"{self.c}*2^(v-1)",
                "constant": f"{self.c}"}.get(self.family, self.family)


@dataclass(frozen=True)
class Config:
    n: int
    f: int
    gst: Time
    delta: Time
    rho: Time
    view_timeout: TimeoutFn
    seed: int = 0
    newleader_timeout: Optional[TimeoutFn] = None   # two-phase HotStuff
    fast_path_timeout: Optional[TimeoutFn] = None   # SBFT
    lock_timeout: Optional[TimeoutFn] = None        # Tendermint
    horizon: Optional[Time] = None
    unchecked_timeouts: bool = False

    def __post_init__(self):
        for name in ("gst", "delta", "rho"):
            object.__setattr__(self, name, as_time(getattr(self, name)))
        if self.horizon is not None:
            object.__setattr__(self, "horizon", as_time(self.horizon))

    @property
    def quorum(self) -> int:
        return 2 * self.f + 1

    def F(self, v: int) -> Time:
        return self.view_timeout(v)

    def problems(self) -> list[str]:
        out = []
        if self.f < 0:
            out.append("f must be non-negative")
        if self.n != 3 * self.f + 1:
            out.append(f"n must equal 3f+1 (n={self.n}, f={self.f})")
        if self.delta <= 0:
            out.append(f"delta must be positive, got {self.delta}")
        if self.rho <= 0:
            out.append(f"rho must be positive, got {self.rho}")
        if self.gst < 0:
            out.append(f"gst must be non-negative, got {self.gst}")
        if self.horizon is not None and self.horizon < 0:
            out.append("horizon must be non-negative")
        if not self.unchecked_timeouts:
            out.extend(self.view_timeout.problems(main=True))
            for aux in (self.newleader_timeout, self.fast_path_timeout, self.lock_timeout):
                if aux is not None:
                    out.extend(aux.problems(main=False))
        return out

    def validate(self) -> "Config":
        problems = self.problems()
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def default_horizon(self, last_start: Time = 0) -> Time:
        """``max(gst, last start) + 50*F(3f+1)``: liveness bounds are finite sums of F and delta."""
        return norm(max(self.gst, last_start) + 50 * self.F(3 * self.f + 1))
