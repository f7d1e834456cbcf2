"""
Synchronizing after a chaotic period
====================================

Before GST=1000 half the messages are lost, clocks run at 1/4 or 4 times real
time, and process 4 only tells half the system about its wishes. After GST
the correct processes lock step through the views again. The checker finds
the first view V from which the synchronizer properties hold.
"""
from pathlib import Path

from viewsync import check_trace, load_scenario, run

HERE = Path(__file__).resolve().parent
scn = load_scenario(HERE.parent / "scenarios" / "pre_gst_chaos.yaml").with_seed(11)
cfg = scn.config

result = run(scn)
checked = check_trace(result.trace)
m = checked.metrics

# the global view GV(t) climbs erratically before GST and steadily after it
for t in range(0, 2501, 250):
    print(f"GV({t:>4}) = {m.GV(t)}")

V = checked.V
print(f"\nV = {V}, first entered at {m.E_first[V]} (GST = {cfg.gst})")
for v in range(V, V + 4):
    print(f"view {v}: E_first {m.E_first[v]}  E_last {m.E_last[v]}  F(v) = {cfg.F(v)}")

print()
for vid in ("property-2", "property-3", "property-4", "property-5", "property-A", "property-C"):
    verdict = checked.get(vid)
    print(f"{verdict.status:8} {vid:11} {verdict.note}")
