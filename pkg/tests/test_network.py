import random

import pytest

from viewsync.byzantine import WishEquivocator, make_behavior
from viewsync.messages import NewLeader, Prepared, Propose, SignedRecord, Value, Wish
from viewsync.network import ForgeryError, Network, Rule
from viewsync.scenario import ScenarioError, parse_scenario
from viewsync.sim import ClockSchedule, ConfigError, Simulator

from helpers import scenario
from viewsync.runner import run


def _net(gst=100, rules=(), theta=None, correct=(1, 2, 3, 4)):
    sim = Simulator({p: ClockSchedule(gst) for p in range(1, 5)})
    log = []
    net = Network(sim, gst, 10, correct, list(rules), random.Random(1),
                  lambda kind, pid=None, **d: log.append((kind, pid, d)), theta)
    return sim, net, log


def test_post_gst_delay_above_delta_is_clamped_and_logged():
    sim, net, log = _net(rules=[Rule(delay=(20, 20))])
    sim.now = 103
    env = net.send(1, 2, Wish(1))
    assert env.delivery_time == 113
    assert [k for k, _, _ in log].count("warning") == 1


def test_post_gst_drop_between_correct_is_clamped():
    sim, net, log = _net(rules=[Rule(drop=1.0)])
    sim.now = 100
    assert net.send(1, 2, Wish(1)).delivery_time == 110
    assert any(k == "warning" for k, _, _ in log)


def test_self_send_is_immediate_even_when_dropping():
    sim, net, _ = _net(rules=[Rule(drop=1.0)])
    sim.now = 40
    assert net.send(3, 3, Wish(1)).delivery_time == 40


def test_pre_gst_drop_allowed():
    sim, net, log = _net(rules=[Rule(phase="pre", drop=1.0)])
    sim.now = 50
    assert net.send(1, 2, Wish(1)).delivery_time is None
    assert not any(k == "warning" for k, _, _ in log)


def test_post_gst_byzantine_receiver_not_clamped():
    sim, net, log = _net(rules=[Rule(delay=(30, 30))], correct=(1, 2, 3))
    sim.now = 100
    assert net.send(1, 4, Wish(1)).delivery_time == 130
    assert not log[:-1]


def test_default_delay_within_delta():
    sim, net, _ = _net()
    sim.now = 200
    for _ in range(50):
        at = net.send(1, 2, Wish(1)).delivery_time
        assert 200 <= at <= 210


def test_first_matching_rule_wins():
    rules = [Rule(kinds=frozenset({"WISH"}), deliver_now=True), Rule(delay=(5, 5))]
    sim, net, _ = _net(gst=1000, rules=rules)
    sim.now = 10
    assert net.send(1, 2, Wish(1)).delivery_time == 10
    assert net.send(1, 2, Prepared(1, "#x")).delivery_time == 15


def test_rbc_correct_sender_after_gst_all_by_theta():
    sim, net, _ = _net(rules=[Rule(delay=(0, 100))], theta=12)
    sim.now = 150
    envs = net.rbc(1, [1, 2, 3, 4], Prepared(1, "#x"))
    assert all(e.delivery_time <= 162 for e in envs)


def test_rbc_pre_gst_first_receipt_caps_at_gst_plus_theta():
    # nobody but the sender gets it before GST; the sender's own copy at 40 counts
    rules = [Rule(phase="pre", drop=1.0)]
    sim, net, _ = _net(rules=rules, theta=12)
    sim.now = 40
    envs = {e.receiver: e.delivery_time for e in net.rbc(1, [1, 2, 3, 4], Prepared(1, "#x"))}
    assert envs[1] == 40
    assert all(envs[p] == 112 for p in (2, 3, 4))


def test_rbc_byzantine_sender_reaching_no_correct_process_is_lost():
    rules = [Rule(senders=frozenset({4}), drop=1.0)]
    sim, net, _ = _net(gst=100, rules=rules, theta=12, correct=(1, 2, 3))
    sim.now = 50
    envs = {e.receiver: e.delivery_time for e in net.rbc(4, [1, 2, 3, 4], Prepared(1, "#y"))}
    assert envs == {1: None, 2: None, 3: None, 4: 50}


def test_rbc_byzantine_subset_still_reaches_every_correct_process():
    sim, net, _ = _net(gst=0, theta=12, correct=(1, 2, 3))
    sim.now = 30
    envs = {e.receiver: e.delivery_time for e in net.rbc(4, [1], Propose(4, Value("b4"), 0))}
    first = envs[1]
    assert all(envs[p] is not None and envs[p] <= first + 12 for p in (1, 2, 3))


def test_rbc_needs_theta():
    _, net, _ = _net()
    with pytest.raises(ConfigError):
        net.rbc(1, [2], Prepared(1, "#x"))


def test_forged_embedded_record_is_rejected():
    _, net, _ = _net()
    forged = SignedRecord(2, Prepared(1, "#x"))
    with pytest.raises(ForgeryError):
        net.send(4, 1, NewLeader(2, 1, Value("x"), frozenset({forged})))


def test_relayed_genuine_record_is_accepted():
    sim, net, _ = _net()
    net.send(2, 1, Prepared(1, "#x"))
    genuine = SignedRecord(2, Prepared(1, "#x"))
    net.send(4, 1, NewLeader(2, 1, Value("x"), frozenset({genuine})))


def test_process_cannot_send_as_another():
    res = run(scenario("property_b"))
    with pytest.raises(ForgeryError):
        res.processes[4]._emit([1], Wish(9), sender=1)


def test_silent_behavior_emits_nothing():
    scn = scenario("property_b")
    scn.adversary.byzantine = {4: {"behavior": "silent"}}
    res = run(scn)
    assert not [r for r in res.trace.records if r.pid == 4]


def test_crashed_process_goes_quiet():
    scn = scenario("property_b")
    scn.adversary.byzantine = {4: {"behavior": "crash", "at": 200}}
    res = run(scn)
    assert [r for r in res.trace.of_kind("send") if r.pid == 4]
    assert not [r for r in res.trace.of_kind("send") if r.pid == 4 and r.t >= 200]


def test_wish_equivocator_withholds_from_one_half():
    b = WishEquivocator(4, 4, 1)
    assert b.targets == [1, 2, 4]
    [(tos, msg)] = b.outgoing(None, [1, 2, 3, 4], Wish(3))
    assert tos == [1, 2, 4] and msg == Wish(3)


def test_wish_equivocator_in_a_run_never_wishes_to_withheld_half():
    scn = scenario("property_b")
    scn.adversary.byzantine = {4: {"behavior": "wish-equivocator"}}
    res = run(scn)
    sent_to = {r.detail["to"] for r in res.trace.of_kind("send")
               if r.pid == 4 and r.detail["msg"].startswith("WISH")}
    assert sent_to == {1, 2, 4}


def test_unknown_behavior_and_parameters_rejected():
    with pytest.raises(ConfigError):
        make_behavior({"behavior": "teleport"}, 4, 4, 1)
    with pytest.raises(ConfigError):
        make_behavior({"behavior": "silent", "loud": True}, 4, 4, 1)


def test_rule_roundtrip_and_validation():
    d = {"senders": [1], "kinds": ["WISH"], "phase": "pre", "views": [1, 2], "drop": 0.5,
         "delay": [1, 3]}
    assert Rule.from_dict(d).to_dict() == d
    with pytest.raises(ConfigError):
        Rule.from_dict({"dly": [1, 2]})
    assert Rule(phase="during").problems()
    assert Rule(drop=1.5).problems()
    assert Rule(delay=(5, 1)).problems()


def test_too_many_byzantine_rejected():
    text = (scenario_text() + "adversary:\n  byzantine: {1: silent, 2: silent}\n")
    with pytest.raises(ScenarioError) as err:
        parse_scenario(text)
    assert any("at most f=1" in e for e in err.value.errors)


def scenario_text():
    return ("system: {n: 4, f: 1, gst: 0, delta: 10, rho: 15}\n"
            "timeouts: {view: {family: linear, c: 30}}\n")


def _stale_node(records):
    from types import SimpleNamespace
    from viewsync.common import Mailbox
    box = Mailbox()
    for rec in records:
        box.insert(rec)
    return SimpleNamespace(replica=SimpleNamespace(mailbox=box))


def test_stale_cert_leader_ignores_the_newest_lock():
    from viewsync.byzantine import StaleCertLeader
    b = StaleCertLeader(2, 4, 1)
    old = SignedRecord(1, NewLeader(6, 2, Value("old"), None))
    new = SignedRecord(3, NewLeader(6, 4, Value("new"), None))
    [(_, m)] = b.outgoing(_stale_node([old, new]), [1, 2, 3, 4], Propose(6, Value("new"), None))
    assert m.value == Value("old")
    [(_, m)] = b.outgoing(_stale_node([new]), [1, 2, 3, 4], Propose(6, Value("new"), None))
    assert m.value == Value("s2.6") and m.just is None
