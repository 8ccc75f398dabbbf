"""Replay a shipped conversation and draw each caption frame.

Runs the checkout conversation through the deterministic replay driver
and renders the DHH-face frame of every broadcast instant as a little
terminal display, so you can watch captions build up, wrap, scroll,
get retracted, and expire.

    python demos/basic_conversation.py
"""

from pathlib import Path

from captioncast.replay import load_session_script, replay_session

ROOT = Path(__file__).resolve().parent.parent


def draw(emission):
    frame = emission.dhh
    print(f"--- t={emission.at:>6} ms   rev={frame['config_rev']} " + "-" * 30)
    if not frame["lines"]:
        print("    (blank display)")
    for line in frame["lines"]:
        text = "".join(line["graphemes"])
        flag = " [RETRACTED]" if line["retracted"] else ""
        print(f"    |{text:<24}|{flag}")


def main():
    ops = load_session_script(ROOT / "data" / "conversations" / "checkout.jsonl")
    emissions = replay_session(ops)
    print(f"{len(emissions)} broadcast instants from {len(ops)} scripted ops\n")
    for emission in emissions:
        draw(emission)
    print("\nNote the misrecognized caption getting flagged at t=6200,")
    print("the corrected re-speak right after, and captions expiring")
    print("once their linger window runs out.")


if __name__ == "__main__":
    main()
