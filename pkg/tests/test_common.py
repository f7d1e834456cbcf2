import pytest
from hypothesis import given
from hypothesis import strategies as st

from viewsync.common import Mailbox, cert_view, check_prepared, is_quorum, leader, newleader_select
from viewsync.messages import NewLeader, Prepared, SignedRecord, Value


@pytest.mark.parametrize("v, n, expected", [(1, 4, 1), (4, 4, 4), (5, 4, 1), (9, 7, 2)])
def test_round_robin_leader(v, n, expected):
    assert leader(v, n) == expected


def test_leader_rejects_view_zero():
    with pytest.raises(ValueError):
        leader(0, 4)


def test_quorum_counts_distinct_members():
    assert is_quorum([1, 2, 3], 1)
    assert not is_quorum([1, 1, 2], 1)
    assert is_quorum(range(1, 6), 2) and not is_quorum(range(1, 5), 2)


def _cert(view, h, signers):
    return frozenset(SignedRecord(s, Prepared(view, h)) for s in signers)


def test_check_prepared():
    assert check_prepared(_cert(3, "#x", [1, 2, 3]), 3, "#x", 1)
    assert not check_prepared(_cert(3, "#x", [1, 2]), 3, "#x", 1)
    assert not check_prepared(_cert(3, "#x", [1, 2, 3]), 2, "#x", 1)
    assert not check_prepared(_cert(3, "#x", [1, 2, 3]), 3, "#y", 1)
    mixed = _cert(3, "#x", [1, 2, 3]) | _cert(3, "#y", [4])
    assert not check_prepared(mixed, 3, "#x", 1)
    assert not check_prepared(None, 3, "#x", 1)


def test_cert_view():
    assert cert_view(_cert(2, "#x", [1, 2, 3])) == 2
    assert cert_view(_cert(2, "#x", [1]) | _cert(3, "#x", [2])) is None
    assert cert_view(None) is None


def test_mailbox_keeps_highest_view_per_type_and_sender():
    box = Mailbox()
    assert box.insert(SignedRecord(2, Prepared(3, "#x")))
    assert not box.insert(SignedRecord(2, Prepared(3, "#y")))   # same view: first one stays
    assert not box.insert(SignedRecord(2, Prepared(1, "#z")))
    assert box.get("PREPARED", 2).body == Prepared(3, "#x")
    assert box.insert(SignedRecord(2, Prepared(5, "#w")))
    assert box.get("PREPARED", 2).body == Prepared(5, "#w")
    assert len(box) == 1


def test_mailbox_records_filter_and_order():
    box = Mailbox()
    for s, v in [(3, 2), (1, 2), (2, 1)]:
        box.insert(SignedRecord(s, Prepared(v, "#x")))
    assert [r.signer for r in box.records("PREPARED", 2)] == [1, 3]
    assert [r.signer for r in box.records("PREPARED")] == [1, 2, 3]
    assert box.records("COMMITTED") == []


@given(st.lists(st.tuples(st.sampled_from(["PREPARED", "NEWLEADER"]), st.integers(1, 4),
                          st.integers(1, 50)), max_size=200))
def test_mailbox_size_bounded_by_kinds_times_senders(msgs):
    box = Mailbox()
    best: dict = {}
    for kind, s, v in msgs:
        body = Prepared(v, "#x") if kind == "PREPARED" else NewLeader(v, 0, None, None)
        box.insert(SignedRecord(s, body))
        best[(kind, s)] = max(best.get((kind, s), 0), v)
    assert len(box) <= 2 * 4
    for (kind, s), v in best.items():
        assert box.get(kind, s).body.view == v


def test_newleader_select_highest_vview():
    a, b = Value("a"), Value("b")
    recs = [SignedRecord(1, NewLeader(5, 2, a, None)), SignedRecord(2, NewLeader(5, 3, b, None)),
            SignedRecord(3, NewLeader(5, 0, None, None))]
    assert newleader_select(recs).val == b
    assert newleader_select(recs[2:]) is None
