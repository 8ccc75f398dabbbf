"""The recognition-error correction loop, end to end.

A scripted utterance is run through the deterministic error injector
(standing in for a misbehaving recognizer), the speaker flags it, the
caption gets retracted on screen, and the re-spoken utterance replaces
it. Exactly the flag-and-respeak flow a hearing speaker drives with
the error button.

    python demos/error_correction.py
"""

from captioncast.replay import parse_session_line, replay_session


def line(at_ms, uid, seq, kind, text):
    return {"at_ms": at_ms, "utterance_id": uid, "seq": seq, "kind": kind, "text": text}


SCRIPT = [
    line(0, "u1", 1, "partial", "the total"),
    line(300, "u1", 2, "partial", "the total is seven"),
    line(700, "u1", 3, "final", "the total is seven dollars"),
    {"at_ms": 1600, "cmd": "retract_last"},   # speaker flags the error
    line(2200, "u2", 1, "partial", "the total"),
    line(2600, "u2", 2, "final", "the total is seven dollars"),
]


def show(emissions, title):
    print(title)
    for e in emissions:
        lines = [
            ("".join(l["graphemes"]), l["retracted"]) for l in e.dhh["lines"]
        ]
        rendered = " / ".join(f"{t!r}{' [X]' if r else ''}" for t, r in lines) or "(blank)"
        print(f"  t={e.at:>5}: {rendered}")
    print()


def main():
    ops = [parse_session_line(obj) for obj in SCRIPT]

    show(replay_session(ops), "Clean recognizer (retract still scripted):")

    # rate=1.0 scrambles every word of final hypotheses; partials pass
    # through, which is how a real misrecognition surprises the reader.
    noisy = replay_session(ops, error_rate=1.0, seed=7)
    show(noisy, "Misbehaving recognizer (rate=1.0, seed=7):")

    print("[X] marks the retracted caption that stays visible while the")
    print("speaker re-speaks, so both parties see what went wrong.")


if __name__ == "__main__":
    main()
