"""
Decision latency of five single-shot protocols
==============================================

Each scenario runs one protocol over a handful of seeds with all processes
starting after GST. The summary compares the latest decision time with the
latency bound the checker derived for the run; a bound marked ``*`` was not
applicable because its timeout hypotheses do not hold.
"""
from pathlib import Path

from viewsync import check_trace, load_scenario, run
from viewsync.report import build_report, emit_summary

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
names = ["hs3_favorable", "hs3_faulty_leader", "hs2_favorable", "hs2_faulty_leader",
         "pbft_favorable", "sbft_fast", "sbft_slow", "sbft_no_timer", "tendermint"]

reports = []
for name in names:
    base = load_scenario(SCENARIOS / f"{name}.yaml")
    for seed in range(3):
        scn = base.with_seed(seed)
        result = run(scn)
        reports.append(build_report(scn, result.status, check_trace(result.trace), result.trace))

print(emit_summary(reports))

# two-phase HotStuff trades one round trip for the leader's NEWLEADER wait
hs2 = next(r for r in reports if r.protocol == "hotstuff2")
hs3 = next(r for r in reports if r.protocol == "hotstuff3")
print("\nfavorable bound after S_last: hotstuff2",
      next(v.bound for v in hs2.verdicts if v.id == "latency:hs2.favorable") - hs2.S_last,
      " hotstuff3", next(v.bound for v in hs3.verdicts if v.id == "latency:hs3.favorable") - hs3.S_last)
