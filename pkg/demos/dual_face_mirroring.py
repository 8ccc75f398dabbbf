"""One caption, two faces of the display.

The DHH reader gets the full-size frame; the speaker on the far side
of the glass gets the same content tagged mirrored and scaled down,
so it reads correctly through the back of a transparent panel. The
flip is pure render metadata: the text in the data is never reversed,
which is what lets the speaker verify the recognizer heard them right.

    python demos/dual_face_mirroring.py
"""

from captioncast.core.config import CaptionConfig
from captioncast.core.events import EventKind, TranscriptEvent
from captioncast.core.frames import Face, frame_payload, layout_frame, mirror_frame
from captioncast.core.state import SessionState, ingest_event


def main():
    config = CaptionConfig(mirror_scale=0.4, line_width=20)
    state = SessionState(session_id="demo")
    event = TranscriptEvent(
        session_id="demo",
        utterance_id="u1",
        seq=1,
        kind=EventKind.FINAL,
        text="こんにちは welcome in",
        recv_ts=0,
    )
    ingest_event(state, event, 0, config)

    dhh = layout_frame(state, config, Face.DHH, now=100)
    hearing = mirror_frame(dhh, config)

    for frame in (dhh, hearing):
        payload = frame_payload(frame)
        print(f"face={payload['face']:<8} mirrored={payload['mirrored']!s:<5} scale={payload['scale']}")
        for line in payload["lines"]:
            print(f"    {''.join(line['graphemes'])!r}")
        print()

    assert frame_payload(dhh)["lines"] == frame_payload(hearing)["lines"]
    print("Line content compares equal on both faces; only the face,")
    print("mirrored, and scale metadata differ. A client renders the")
    print("hearing face with a CSS scaleX(-1) on the container.")


if __name__ == "__main__":
    main()
