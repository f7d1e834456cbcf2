"""Deterministic simulation of the FastSync view synchronizer and the
single-shot consensus protocols built on it, with a trace checker."""

from .checker import CheckResult, Verdict, check_trace, compute_metrics
from .config import Config, TimeoutFn
from .fastsync import FastSync, derive_views
from .runner import PROTOCOLS, RunResult, Scenario, run
from .scenario import emit_scenario, load_scenario, parse_scenario
from .sim import ConfigError
from .trace import Trace

__version__ = "0.1.0"

__all__ = [
    "CheckResult", "Verdict", "check_trace", "compute_metrics", "Config", "TimeoutFn",
    "FastSync", "derive_views", "PROTOCOLS", "RunResult", "Scenario", "run",
    "emit_scenario", "load_scenario", "parse_scenario", "ConfigError", "Trace",
]
