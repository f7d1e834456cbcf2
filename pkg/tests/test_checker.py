import copy

from viewsync.checker import (
    FAIL,
    PASS,
    VACUOUS,
    check_latency,
    check_properties_1_to_5,
    check_property_A,
    check_property_B,
    check_property_C,
    check_safety,
    check_tm_validall,
    check_trace,
    compute_metrics,
)
from viewsync.scenario import parse_dict

from helpers import BASE_DOC, header_trace, run_and_check, scenario


def build(events, end=200, correct=(1, 2, 3, 4), **sections):
    """Trace from a config header plus (t, pid, kind, detail) events, closed by an end record."""
    doc = copy.deepcopy(BASE_DOC)
    for name, changes in sections.items():
        doc[name].update(changes)
    doc["resolved"] = {"starts": {}, "correct": list(correct)}
    tr = header_trace(doc)
    for t, pid, kind, detail in sorted(events, key=lambda e: e[0]):
        tr.record(t, pid, kind, **detail)
    tr.record(end, None, "end", status="quiescent")
    cfg = parse_dict({k: v for k, v in doc.items() if k != "resolved"}).config
    return tr, cfg


def enters(v, times):
    return [(t, p, "enter", {"v": v}) for p, t in zip((1, 2, 3, 4), times)]


def starts(times):
    return [(t, p, "start", {}) for p, t in zip((1, 2, 3, 4), times)]


def by_id(verdicts):
    return {v.id: v for v in verdicts}


def test_metrics_entry_times_and_global_view():
    tr, _ = build(enters(1, [10, 12, 15, 20]) + [(50, 1, "enter", {"v": 2})] + starts([0, 2, 4, 9]))
    m = compute_metrics(tr)
    assert (m.E_first[1], m.E_last[1]) == (10, 20)
    assert 2 in m.E_first and 2 not in m.E_last
    assert (m.GV(5), m.GV(11), m.GV(49), m.GV(50)) == (0, 1, 1, 2)
    assert m.LV(1, 49) == 1 and m.LV(4, 19) == 0
    assert m.tfk(2) == 2 and m.S_first == 0 and m.S_last == 9


def test_metrics_ignore_byzantine_records():
    tr, _ = build(enters(1, [10, 12, 15, 20]) + [(11, 4, "enter", {"v": 7})], correct=(1, 2, 3))
    m = compute_metrics(tr)
    assert m.E_last[1] == 15 and 7 not in m.E_first


def test_property_1_flags_non_increasing_entries():
    tr, cfg = build(enters(1, [0] * 4) + [(40, 1, "enter", {"v": 3}), (45, 1, "enter", {"v": 2})])
    _, verdicts = check_properties_1_to_5(compute_metrics(tr), cfg)
    assert by_id(verdicts)["property-1"].status == FAIL


def test_property_4_spread_of_three_delta_fails():
    tr, cfg = build(enters(1, [0, 0, 0, 30]))
    V, verdicts = check_properties_1_to_5(compute_metrics(tr), cfg)
    got = by_id(verdicts)
    assert V is None
    assert got["property-4"].status == FAIL
    assert got["synchronization"].status == FAIL


def test_property_4_spread_of_two_delta_passes():
    tr, cfg = build(enters(1, [0, 0, 0, 20]))
    V, verdicts = check_properties_1_to_5(compute_metrics(tr), cfg)
    assert V == 1 and by_id(verdicts)["property-4"].status == PASS


def test_skipped_view_fails_property_3():
    events = enters(1, [0] * 4) + enters(2, [40, 40, 40, None])[:3] + enters(3, [110] * 4)
    tr, cfg = build(events)
    _, verdicts = check_properties_1_to_5(compute_metrics(tr), cfg, V=1)
    p3 = by_id(verdicts)["property-3"]
    assert p3.status == FAIL and "view 2 never entered by [4]" in p3.note


def test_property_5_early_entry_fails():
    tr, cfg = build(enters(1, [0] * 4) + enters(2, [20] * 4))
    _, verdicts = check_properties_1_to_5(compute_metrics(tr), cfg, V=1)
    assert by_id(verdicts)["property-5"].status == FAIL


def test_property_A_late_next_view_fails():
    # E_last(1) + F(1) + delta = 0 + 30 + 10 = 40, but view 2 completes at 60
    tr, cfg = build(enters(1, [0] * 4) + enters(2, [60] * 4) + enters(3, [150] * 4))
    m = compute_metrics(tr)
    V, _ = check_properties_1_to_5(m, cfg)
    a, total = check_property_A(m, cfg, V)
    assert V == 1
    assert a.status == FAIL and "E_last(2)=60 > 40" in a.note
    assert total.status == FAIL


def test_property_A_holds_on_timely_entries():
    tr, cfg = build(enters(1, [0] * 4) + enters(2, [35, 36, 38, 40]) + enters(3, [100, 101, 105, 110]))
    m = compute_metrics(tr)
    V, _ = check_properties_1_to_5(m, cfg)
    a, _ = check_property_A(m, cfg, V)
    assert a.status == PASS


def test_property_B_pass_and_fail():
    ok, cfg = build(starts([100, 101, 102, 105]) + enters(1, [110, 111, 112, 115]))
    v = check_property_B(compute_metrics(ok), cfg)
    assert (v.status, v.bound, v.observed) == (PASS, 115, 115)
    late, cfg = build(starts([100, 101, 102, 105]) + enters(1, [110, 111, 112, 116]))
    assert check_property_B(compute_metrics(late), cfg).status == FAIL


def test_property_B_vacuous_when_gst_after_first_start():
    tr, cfg = build(starts([5, 60, 60, 60]) + enters(1, [65] * 4), system={"gst": 50})
    v = check_property_B(compute_metrics(tr), cfg)
    assert v.status == VACUOUS and "GST" in v.note


def test_property_B_vacuous_when_first_timeout_is_exactly_two_delta():
    tr, cfg = build(starts([0] * 4) + enters(1, [0] * 4), timeouts={"view": {"family": "linear", "c": 20}})
    v = check_property_B(compute_metrics(tr), cfg)
    assert v.status == VACUOUS and "F(1) <= 2delta" in v.note


def test_property_C_vacuous_without_early_starts():
    tr, cfg = build(starts([0, 300, 300, 300]) + enters(1, [310] * 4), system={"gst": 100})
    assert check_property_C(compute_metrics(tr), cfg).status == VACUOUS


SAFETY_SECTIONS = {"protocol": {"name": "pbft"}}


def test_agreement_violation_detected():
    events = [(50, 1, "decide", {"v": 1, "value": "a", "valid": True, "path": "slow", "repeat": False}),
              (60, 2, "decide", {"v": 2, "value": "b", "valid": True, "path": "slow", "repeat": False})]
    tr, cfg = build(events, **SAFETY_SECTIONS)
    got = by_id(check_safety(tr, "pbft", cfg))
    assert got["agreement"].status == FAIL and got["validity"].status == PASS


def test_validity_violation_detected():
    events = [(50, 1, "decide", {"v": 1, "value": "z!", "valid": False, "path": "slow", "repeat": False})]
    tr, cfg = build(events, **SAFETY_SECTIONS)
    assert by_id(check_safety(tr, "pbft", cfg))["validity"].status == FAIL


def test_byzantine_decisions_are_not_judged():
    events = [(50, 1, "decide", {"v": 1, "value": "a", "valid": True, "path": "slow", "repeat": False}),
              (60, 4, "decide", {"v": 1, "value": "b", "valid": False, "path": "slow", "repeat": False})]
    tr, cfg = build(events, correct=(1, 2, 3), **SAFETY_SECTIONS)
    got = by_id(check_safety(tr, "pbft", cfg))
    assert got["agreement"].status == PASS and got["validity"].status == PASS


def test_prepared_uniqueness_and_state_order():
    events = [(10, 1, "prepare", {"v": 1, "value": "a"}), (11, 2, "prepare", {"v": 1, "value": "b"}),
              (12, 3, "state", {"cv": 1, "lv": 2}),
              (13, 1, "state", {"cv": 3, "lv": 1}), (14, 1, "state", {"cv": 2, "lv": 1})]
    tr, cfg = build(events, **SAFETY_SECTIONS)
    got = by_id(check_safety(tr, "pbft", cfg))
    assert got["prepared-uniqueness"].status == FAIL
    order = got["state-order"]
    assert order.status == FAIL and "lv=2 > cv=1" in order.note and "cv decreased 3 -> 2" in order.note


def test_envelope_violation_detected():
    events = [(10, 1, "send", {"to": 2, "msg": "WISH(1)", "at": 25, "ch": "p2p"})]
    tr, cfg = build(events)
    got = by_id(check_trace(tr).verdicts)
    assert got["envelope"].status == FAIL


def test_late_decision_fails_latency():
    # PBFT favorable: S_last + 4 delta = 40
    sections = {"protocol": {"name": "pbft"}, "timeouts": {"view": {"family": "linear", "c": 60}}}
    dec = [(t, p, "decide", {"v": 1, "value": "a", "valid": True, "path": "slow", "repeat": False})
           for p, t in zip((1, 2, 3, 4), (30, 35, 40, 41))]
    tr, cfg = build(starts([0] * 4) + enters(1, [0] * 4) + dec, **sections)
    got = by_id(check_latency(tr, compute_metrics(tr), "pbft", cfg))
    v = got["latency:pbft.favorable"]
    assert (v.status, v.bound, v.observed) == (FAIL, 40, 41)


def test_undecided_before_trace_end_is_vacuous_not_fail():
    sections = {"protocol": {"name": "pbft"}, "timeouts": {"view": {"family": "linear", "c": 60}}}
    tr, cfg = build(starts([0] * 4) + enters(1, [0] * 4), end=30, **sections)
    got = by_id(check_latency(tr, compute_metrics(tr), "pbft", cfg))
    assert got["latency:pbft.favorable"].status == VACUOUS


def test_tm_validall_flags_leaving_locked_view_unprepared():
    sections = {"protocol": {"name": "tendermint", "theta": 12},
                "timeouts": {"view": {"family": "linear", "c": 78}, "lock": {"family": "constant", "c": 45}}}
    events = (enters(1, [0] * 4) + [(5, 1, "lock", {"v": 1, "value": "a", "phase": "prepared"}),
                                    (6, 2, "state", {"cv": 1, "pv": 0, "lv": 0})]
              + enters(2, [80] * 4))
    tr, cfg = build(events, **sections)
    v = check_tm_validall(tr, compute_metrics(tr), cfg, 12, V=1)
    assert v.status == FAIL and "p2 left view 1 with prepared_view 0" in v.note


def test_checker_is_pure():
    res, first = run_and_check(scenario("pbft_favorable"))
    before = res.trace.dumps()
    second = check_trace(res.trace)
    assert res.trace.dumps() == before
    assert [v.to_dict() for v in first.verdicts] == [v.to_dict() for v in second.verdicts]


def test_checker_agrees_on_reloaded_trace():
    res, first = run_and_check(scenario("tendermint"))
    from viewsync.trace import Trace
    again = check_trace(Trace.loads(res.trace.dumps()))
    assert [v.to_dict() for v in first.verdicts] == [v.to_dict() for v in again.verdicts]
