"""
A Tendermint lock carried across a view change
==============================================

Three processes lock a value in view 1 but the COMMITTED messages that would
let them decide are held back until after GST. The leader of view 2 never
saw the view-1 quorum, proposes its own value, and the locked processes
refuse it. The leader of view 3 holds the locked value and everyone decides
it there.
"""
from pathlib import Path

from viewsync import check_trace, load_scenario, run
from viewsync.sim import fmt_time

HERE = Path(__file__).resolve().parent
scn = load_scenario(HERE.parent / "scenarios" / "tendermint_carryover.yaml")
result = run(scn)

interesting = {"enter", "propose", "vote", "prepare", "lock", "decide"}
for r in result.trace.records:
    if r.kind in interesting and r.detail.get("v", 0) <= 3:
        detail = ", ".join(f"{k}={v}" for k, v in r.detail.items() if k in ("v", "value", "path"))
        print(f"t={fmt_time(r.t)!s:>7}  p{r.pid}  {r.kind:8} {detail}")

checked = check_trace(result.trace)
print()
for vid in ("agreement", "latency:tm.theorem", "latency:tm.lemma", "tm.validall"):
    v = checked.get(vid)
    bound = "" if v.bound is None else f"  bound {fmt_time(v.bound)}, observed {fmt_time(v.observed)}"
    print(f"{v.status:8} {vid:20} {v.note}{bound}")
