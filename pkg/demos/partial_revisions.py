"""How streaming hypothesis revisions animate without flicker.

A recognizer revises its interim hypothesis several times. Characters
shared with the previous hypothesis keep their original reveal times
(so text the reader already saw never re-animates); only the changed
tail is rescheduled. This is the common-prefix stability rule.

    python demos/partial_revisions.py
"""

from captioncast.core.schedule import common_prefix_len, compute_reveal_schedule
from captioncast.core.text import graphemes

CHAIN = [
    (0, "he"),
    (400, "hello my"),
    (900, "hello my fried"),      # recognizer guesses wrong
    (1400, "hello my friend"),    # and fixes itself
]
RATE = 10.0  # graphemes per second => 100 ms spacing


def main():
    cells = None
    times = None
    for now, text in CHAIN:
        new_cells = graphemes(text)
        new_times = compute_reveal_schedule(cells, times, new_cells, now, RATE)
        kept = common_prefix_len(cells, new_cells) if cells is not None else 0
        print(f"t={now:>5}  hypothesis={text!r}  (kept {kept} reveal times)")
        for i, (g, t) in enumerate(zip(new_cells, new_times)):
            marker = "kept" if cells is not None and i < kept else "new"
            print(f"         {g!r:>6} reveals at {t:7.1f} ms  [{marker}]")
        cells, times = new_cells, new_times
        print()
    print("The revision at t=900 replaced 'fried' with 'friend': the")
    print("shared prefix 'hello my frie' kept its schedule, the tail")
    print("was rescheduled after the revision arrived.")


if __name__ == "__main__":
    main()
