"""Scenario files: a sectioned YAML document.

::

    system:   {n: 4, f: 1, gst: 0, delta: 10, rho: 15, seed: 0, horizon: null}
    timeouts: {view: {family: linear, c: 30}, newleader: ..., fast_path: ..., lock: ...}
    protocol: {name: hotstuff3, theta: null, stop_on_decide: true}
    starts:   {1: 100, 2: 105, ...}   or   {uniform: [100, 130]}
    clocks:   {1: [[0, 4], [500, 0.25]], ...}   or   {random_rates: [0.25, 4], segment: 100}
    adversary:
      byzantine: {4: {behavior: wish-equivocator, boost: 1}}
      rules: [{phase: pre, drop: 0.5}, {kinds: [PROPOSE], delay: [0, 30]}]

Times accept ints, decimals and "a/b" strings. Parsing reports every problem
at once rather than stopping at the first.
"""
from __future__ import annotations

from typing import Any

import yaml

from .byzantine import behavior_problems
from .config import Config, TimeoutFn
from .network import AdversaryScript, Rule
from .runner import Scenario
from .sim import ConfigError, as_time, fmt_time

SECTIONS = {
    "system": {"n", "f", "gst", "delta", "rho", "seed", "horizon"},
    "timeouts": {"view", "newleader", "fast_path", "lock", "unchecked"},
    "protocol": {"name", "theta", "stop_on_decide"},
    "starts": None,
    "clocks": None,
    "adversary": {"byzantine", "rules"},
}
AUX = {"newleader": "newleader_timeout", "fast_path": "fast_path_timeout", "lock": "lock_timeout"}


class ScenarioError(ConfigError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class _Collector:
    def __init__(self):
        self.errors: list[str] = []

    def __call__(self, where: str, fn, *args, default=None):
        try:
            return fn(*args)
        except (ConfigError, ValueError, TypeError, KeyError) as exc:
            self.errors.append(f"{where}: {exc}")
            return default


def _section(doc: dict, name: str, errs: _Collector) -> dict:
    sec = doc.get(name) or {}
    if not isinstance(sec, dict):
        errs.errors.append(f"{name}: expected a mapping")
        return {}
    allowed = SECTIONS[name]
    if allowed is not None:
        for key in sorted(set(sec) - allowed, key=str):
            errs.errors.append(f"{name}: unknown key {key!r}")
    return sec


def _timeout(d: Any) -> TimeoutFn:
    if not isinstance(d, dict) or set(d) != {"family", "c"}:
        raise ConfigError("expected {family, c}")
    return TimeoutFn(d["family"], d["c"])


def _pid(key) -> int:
    pid = int(key)
    if str(pid) != str(key).strip():
        raise ConfigError(f"bad process id {key!r}")
    return pid


def parse_dict(doc: Any) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError(["scenario must be a mapping of sections"])
    errs = _Collector()
    for key in sorted(set(doc) - set(SECTIONS), key=str):
        errs.errors.append(f"unknown section {key!r}")

    system = _section(doc, "system", errs)
    for key in ("n", "f", "gst", "delta", "rho"):
        if key not in system:
            errs.errors.append(f"system: missing {key!r}")
    timeouts = _section(doc, "timeouts", errs)
    if "view" not in timeouts:
        errs.errors.append("timeouts: missing 'view'")
    view = errs("timeouts.view", _timeout, timeouts.get("view")) if "view" in timeouts else None
    aux = {}
    for key, field_name in AUX.items():
        if timeouts.get(key) is not None:
            aux[field_name] = errs(f"timeouts.{key}", _timeout, timeouts[key])

    proto = doc.get("protocol", "none")
    if isinstance(proto, str):
        proto = {"name": proto}
    else:
        proto = _section(doc, "protocol", errs)
    theta = proto.get("theta")
    theta = None if theta is None else errs("protocol.theta", as_time, theta)

    raw_starts = _section(doc, "starts", errs)
    starts: dict = {}
    if "uniform" in raw_starts:
        if len(raw_starts) != 1:
            errs.errors.append("starts: 'uniform' cannot be mixed with per-process times")
        rng = raw_starts["uniform"]
        if isinstance(rng, list) and len(rng) == 2:
            starts = {"uniform": [errs("starts.uniform", as_time, x, default=0) for x in rng]}
        else:
            errs.errors.append("starts.uniform: expected [lo, hi]")
    else:
        for key, t in raw_starts.items():
            pid = errs("starts", _pid, key)
            if pid is not None:
                starts[pid] = errs(f"starts.{key}", as_time, t, default=0)

    raw_clocks = _section(doc, "clocks", errs)
    clocks: dict = {}
    if "random_rates" in raw_clocks:
        for key in sorted(set(raw_clocks) - {"random_rates", "segment"}, key=str):
            errs.errors.append(f"clocks: unknown key {key!r}")
        rates = raw_clocks["random_rates"]
        if not isinstance(rates, list):
            errs.errors.append("clocks.random_rates: expected a list")
            rates = []
        clocks = {"random_rates": [errs("clocks.random_rates", as_time, r, default=1) for r in rates]}
        if "segment" in raw_clocks:
            clocks["segment"] = errs("clocks.segment", as_time, raw_clocks["segment"], default=1)
    else:
        for key, segs in raw_clocks.items():
            pid = errs("clocks", _pid, key)
            if pid is None:
                continue
            try:
                clocks[pid] = [(as_time(s), as_time(r)) for s, r in segs]
            except (ConfigError, TypeError, ValueError) as exc:
                errs.errors.append(f"clocks.{key}: expected [[real_start, rate], ...] ({exc})")

    adv = _section(doc, "adversary", errs)
    byzantine = {}
    for key, spec in (adv.get("byzantine") or {}).items():
        pid = errs("adversary.byzantine", _pid, key)
        if pid is None:
            continue
        if isinstance(spec, str):
            spec = {"behavior": spec}
        if not isinstance(spec, dict):
            errs.errors.append(f"adversary.byzantine.{key}: expected a mapping")
            continue
        errs.errors.extend(f"adversary.byzantine.{key}: {p}" for p in behavior_problems(spec))
        byzantine[pid] = dict(spec)
    rules = []
    for i, rd in enumerate(adv.get("rules") or []):
        rule = errs(f"adversary.rules[{i}]", Rule.from_dict, rd)
        if rule is not None:
            rules.append(rule)

    if errs.errors and (view is None or any(k not in system for k in ("n", "f", "gst", "delta", "rho"))):
        raise ScenarioError(errs.errors)
    cfg = errs("system", lambda: Config(
        n=int(system["n"]), f=int(system["f"]), gst=system["gst"], delta=system["delta"],
        rho=system["rho"], view_timeout=view, seed=int(system.get("seed", 0)),
        horizon=system.get("horizon"), unchecked_timeouts=bool(timeouts.get("unchecked", False)),
        **aux))
    if cfg is None:
        raise ScenarioError(errs.errors)
    scn = Scenario(cfg, protocol=str(proto.get("name", "none")), theta=theta, starts=starts,
                   clocks=clocks, adversary=AdversaryScript(byzantine, rules),
                   stop_on_decide=bool(proto.get("stop_on_decide", True)))
    errors = errs.errors + scn.problems()
    if errors:
        raise ScenarioError(errors)
    return scn


def parse_scenario(text: str) -> Scenario:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError([f"not valid YAML: {exc}"]) from exc
    return parse_dict(doc)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def emit_dict(scn: Scenario) -> dict:
    cfg = scn.config
    timeouts: dict = {"view": cfg.view_timeout.to_dict()}
    for key, field_name in AUX.items():
        fn = getattr(cfg, field_name)
        if fn is not None:
            timeouts[key] = fn.to_dict()
    if cfg.unchecked_timeouts:
        timeouts["unchecked"] = True
    if "uniform" in scn.starts:
        starts: dict = {"uniform": [fmt_time(x) for x in scn.starts["uniform"]]}
    else:
        starts = {pid: fmt_time(t) for pid, t in sorted(scn.starts.items())}
    if "random_rates" in scn.clocks:
        clocks: dict = {"random_rates": [fmt_time(r) for r in scn.clocks["random_rates"]]}
        if "segment" in scn.clocks:
            clocks["segment"] = fmt_time(scn.clocks["segment"])
    else:
        clocks = {pid: [[fmt_time(s), fmt_time(r)] for s, r in segs]
                  for pid, segs in sorted(scn.clocks.items())}
    return {
        "system": {"n": cfg.n, "f": cfg.f, "gst": fmt_time(cfg.gst), "delta": fmt_time(cfg.delta),
                   "rho": fmt_time(cfg.rho), "seed": cfg.seed, "horizon": fmt_time(cfg.horizon)},
        "timeouts": timeouts,
        "protocol": {"name": scn.protocol, "theta": fmt_time(scn.theta),
                     "stop_on_decide": scn.stop_on_decide},
        "starts": starts,
        "clocks": clocks,
        "adversary": {"byzantine": {pid: dict(spec) for pid, spec in sorted(scn.adversary.byzantine.items())},
                      "rules": [r.to_dict() for r in scn.adversary.rules]},
    }


def emit_scenario(scn: Scenario) -> str:
    return yaml.safe_dump(emit_dict(scn), sort_keys=False, default_flow_style=None)
