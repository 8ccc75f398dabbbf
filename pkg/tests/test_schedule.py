"""Reveal scheduling: spec'd arithmetic plus prefix stability."""

import random

import pytest

from captioncast.core.schedule import common_prefix_len, compute_reveal_schedule
from captioncast.core.text import graphemes
from oracles import schedule_reference


def test_fresh_schedule_starts_at_now():
    times = compute_reveal_schedule(None, None, graphemes("abcde"), 0, 10.0)
    assert times == (0.0, 100.0, 200.0, 300.0, 400.0)


def test_revision_keeps_prefix_and_reschedules_tail():
    prev = graphemes("abc")
    prev_times = (0.0, 100.0, 200.0)
    times = compute_reveal_schedule(prev, prev_times, graphemes("abXY"), 250, 10.0)
    # "ab" kept; "X","Y" rescheduled from max(250, 100).
    assert times == (0.0, 100.0, 350.0, 450.0)


def test_identical_text_keeps_schedule():
    prev = graphemes("abc")
    prev_times = (0.0, 100.0, 200.0)
    times = compute_reveal_schedule(prev, prev_times, graphemes("abc"), 999, 10.0)
    assert times == prev_times


def test_tail_waits_for_unrevealed_prefix():
    # Last kept time is in the future relative to now.
    prev = graphemes("abcd")
    prev_times = (0.0, 100.0, 200.0, 300.0)
    times = compute_reveal_schedule(prev, prev_times, graphemes("abcdE"), 150, 10.0)
    assert times == (0.0, 100.0, 200.0, 300.0, 400.0)


def test_full_replacement_reschedules_from_now():
    prev = graphemes("abc")
    prev_times = (0.0, 100.0, 200.0)
    times = compute_reveal_schedule(prev, prev_times, graphemes("xyz"), 250, 10.0)
    # No prefix kept: tail starts one step after now.
    assert times == (350.0, 450.0, 550.0)


def test_empty_new_text():
    prev = graphemes("abc")
    prev_times = (0.0, 100.0, 200.0)
    assert compute_reveal_schedule(prev, prev_times, (), 250, 10.0) == ()
    assert compute_reveal_schedule(None, None, (), 0, 10.0) == ()


def test_fractional_step_is_exact_multiplication():
    times = compute_reveal_schedule(None, None, graphemes("abc"), 100, 15.0)
    assert times == (100 + 0 * (1000.0 / 15.0), 100 + 1 * (1000.0 / 15.0), 100 + 2 * (1000.0 / 15.0))


def test_invalid_rate():
    with pytest.raises(ValueError):
        compute_reveal_schedule(None, None, graphemes("a"), 0, 0)


def test_common_prefix_len():
    assert common_prefix_len(graphemes("abc"), graphemes("abx")) == 2
    assert common_prefix_len((), graphemes("a")) == 0
    assert common_prefix_len(graphemes("ab"), graphemes("ab")) == 2


def test_matches_reference_on_random_chains():
    rng = random.Random(4242)
    for _ in range(300):
        rate = rng.choice([1, 5, 10, 15, 30, 120])
        cells = None
        times = None
        now = 0
        for _ in range(rng.randint(1, 6)):
            n = rng.randint(0, 12)
            new = tuple(rng.choice("abcdef ") for _ in range(n))
            got = compute_reveal_schedule(cells, times, new, now, rate)
            expected = tuple(schedule_reference(cells, times, new, now, rate))
            assert got == expected
            # Monotonic, and never before the clock for fresh tails.
            assert all(a <= b for a, b in zip(got, got[1:]))
            cells, times = new, got
            now += rng.randint(1, 1000)
