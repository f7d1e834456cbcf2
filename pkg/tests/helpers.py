from pathlib import Path

from viewsync.checker import check_trace
from viewsync.runner import run
from viewsync.scenario import load_scenario
from viewsync.trace import Trace

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def scenario(name: str):
    return load_scenario(SCENARIOS / f"{name}.yaml")


def run_and_check(scn):
    result = run(scn)
    return result, check_trace(result.trace)


def header_trace(doc: dict) -> Trace:
    """A trace holding only a config header, for hand-built negative traces."""
    tr = Trace()
    tr.record(0, None, "config", **doc)
    return tr


BASE_DOC = {
    "system": {"n": 4, "f": 1, "gst": 0, "delta": 10, "rho": 15, "seed": 0, "horizon": 1000},
    "timeouts": {"view": {"family": "linear", "c": 30}},
    "protocol": {"name": "none", "theta": None, "stop_on_decide": True},
    "starts": {}, "clocks": {}, "adversary": {"byzantine": {}, "rules": []},
}
