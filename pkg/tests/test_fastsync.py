import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viewsync.fastsync import NOTHING, FastSync, SyncStep, derive_views

from oracles import views_by_threshold


@pytest.mark.parametrize("views, expected", [
    ([0, 0, 0, 0], (0, 0)),
    ([3, 2, 1, 0], (1, 2)),
    ([5, 5, 5, 0], (5, 5)),
])
def test_derive_views_examples(views, expected):
    assert derive_views(views, 1) == expected


def test_derive_views_matches_threshold_enumeration_small_sample():
    rng = random.Random(7)
    for _ in range(200):
        f = rng.choice([1, 2, 3])
        views = [rng.randint(0, 6) for _ in range(3 * f + 1)]
        assert derive_views(views, f) == views_by_threshold(views, f)


def test_start_fresh_sends_wish_one():
    s = FastSync(1, 4, 1)
    assert s.start() == SyncStep(wish=1)
    assert s.started


def test_start_after_relay_sends_nothing():
    s = FastSync(1, 4, 1)
    s.handle_wish(2, 2)
    s.handle_wish(3, 2)
    assert s.view_plus == 2
    assert s.start() == NOTHING


def test_start_is_idempotent():
    s = FastSync(1, 4, 1)
    s.start()
    assert s.start() == NOTHING


def test_wish_completing_quorum_enters_without_relay():
    s = FastSync(1, 4, 1)
    s.handle_wish(1, 1)
    s.handle_wish(2, 1)
    assert s.max_views == [1, 1, 0, 0] and s.view_plus == 1
    step = s.handle_wish(3, 1)
    assert step == SyncStep(enter=1, wish=None)
    assert s.last_entered == 1 and s.timer_enabled


def test_single_high_wish_changes_nothing():
    s = FastSync(1, 4, 1)
    assert s.handle_wish(2, 4) == NOTHING
    assert (s.view, s.view_plus) == (0, 0)


def test_second_high_wish_relays_without_entry():
    s = FastSync(1, 4, 1)
    s.handle_wish(1, 4)
    step = s.handle_wish(2, 4)
    assert step == SyncStep(enter=None, wish=4)
    assert s.view == 0


def test_stale_wish_is_noop():
    s = FastSync(1, 4, 1)
    s.handle_wish(2, 3)
    assert s.handle_wish(2, 2) == NOTHING
    assert s.handle_wish(2, 3) == NOTHING
    assert s.max_views[1] == 3


def test_wish_for_view_zero_rejected():
    with pytest.raises(ValueError):
        FastSync(1, 4, 1).handle_wish(2, 0)


def _at(view, view_plus, own=None):
    s = FastSync(1, 4, 1)
    s.view, s.view_plus = view, view_plus
    s.max_views[0] = view_plus if own is None else own
    return s


@pytest.mark.parametrize("view, view_plus, wish", [(3, 3, 4), (3, 5, 5)])
def test_timer_expiry(view, view_plus, wish):
    s = _at(view, view_plus)
    s.timer_enabled = True
    assert s.handle_timer_expiry() == SyncStep(wish=wish)
    assert not s.timer_enabled


def test_timer_expiry_before_any_entry_is_unreachable():
    with pytest.raises(AssertionError):
        FastSync(1, 4, 1).handle_timer_expiry()


def test_periodic_with_timer_enabled_resends_view_plus():
    s = _at(1, 2)
    s.timer_enabled = True
    assert s.handle_periodic() == SyncStep(wish=2)


def test_periodic_idle_process_is_silent():
    assert FastSync(1, 4, 1).handle_periodic() == NOTHING


def test_periodic_after_expiry_wishes_next_view():
    s = _at(3, 3, own=3)
    assert s.handle_periodic() == SyncStep(wish=4)


# --- invariants over random stimulus sequences --------------------------------

ops = st.lists(st.one_of(
    st.tuples(st.just("wish"), st.integers(2, 4), st.integers(1, 8)),
    st.tuples(st.just("expire")),
    st.tuples(st.just("tick")),
    st.tuples(st.just("start")),
), max_size=60)


@settings(max_examples=300)
@given(ops)
def test_sync_invariants(seq):
    s = FastSync(1, 4, 1)
    sent = []
    history = []

    def apply(step):
        pending = [step]
        while pending:
            st_ = pending.pop()
            if st_.enter is not None:
                assert st_.enter > (history[-1] if history else 0)
                history.append(st_.enter)
            if st_.wish is not None:
                sent.append(st_.wish)
                pending.append(s.handle_wish(1, st_.wish))  # immediate self-delivery

    prev = (0, 0, [0] * 4)
    for op in seq:
        if op[0] == "wish":
            apply(s.handle_wish(op[1], op[2]))
        elif op[0] == "expire":
            if s.timer_enabled:
                apply(s.handle_timer_expiry())
        elif op[0] == "tick":
            apply(s.handle_periodic())
        else:
            apply(s.start())
        assert s.view <= s.view_plus
        assert (s.view, s.view_plus) == derive_views(s.max_views, 1)
        assert s.view >= prev[0] and s.view_plus >= prev[1]
        assert all(a >= b for a, b in zip(s.max_views, prev[2]))
        assert len(s.max_views) == 4
        prev = (s.view, s.view_plus, list(s.max_views))
    # the WISH views a correct process sends never decrease
    assert sent == sorted(sent)
    assert s.last_entered == (history[-1] if history else 0)


def test_state_is_fixed_size():
    s = FastSync(1, 7, 2)
    assert not hasattr(s, "__dict__")
    for v in range(1, 200):
        s.handle_wish((v % 7) + 1, v)
    assert len(s.max_views) == 7
