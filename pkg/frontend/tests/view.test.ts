// @vitest-environment happy-dom
//
// Rendering acceptance: mirror correctness (hearing text equals dhh
// text under a container-level flip; controls never flip) and reveal
// fidelity (visible count non-decreasing, complete by the last offset).

import { beforeEach, describe, expect, it } from "vitest";

import type { ConfigPayload, FramePayload } from "../src/protocol.js";
import {
  buildViewModel,
  countVisibleGraphemes,
  renderFrame,
  updateReveals,
  visibleLineTexts,
} from "../src/view.js";

const CONFIG: ConfigPayload = {
  char_size_pt: 36,
  color_rgba: [255, 255, 255, 255],
  opacity: 1,
  font_id: "sans-serif",
  reveal_rate: 15,
  max_lines: 3,
  line_width: 24,
  linger_ms: 4000,
  retract_linger_ms: 1500,
  mirror_scale: 0.5,
  config_rev: 0,
};

function fixedFrame(face: "dhh" | "hearing"): FramePayload {
  return {
    face,
    mirrored: face === "hearing",
    scale: face === "hearing" ? 0.5 : 1.0,
    frame_ts: 1000,
    config_rev: 0,
    lines: [
      {
        utterance_id: "u1",
        retracted: false,
        graphemes: ["こ", "ん", "に", "ち", "は"],
        reveal_offsets_ms: [-100, -50, 0, 50, 100],
      },
      {
        utterance_id: "u2",
        retracted: true,
        graphemes: ["o", "o", "p", "s"],
        reveal_offsets_ms: [-400, -350, -300, -250],
      },
    ],
  };
}

describe("mirror correctness", () => {
  let dhhBox: HTMLElement;
  let hearingBox: HTMLElement;
  let controls: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML =
      '<div id="dhh"></div><div id="hearing"></div><div id="controls"><button>err</button></div>';
    dhhBox = document.getElementById("dhh")!;
    hearingBox = document.getElementById("hearing")!;
    controls = document.getElementById("controls")!;
  });

  it("renders identical text content on both faces for the same frame", () => {
    renderFrame(dhhBox, buildViewModel(fixedFrame("dhh"), CONFIG, 0));
    renderFrame(hearingBox, buildViewModel(fixedFrame("hearing"), CONFIG, 0));
    expect(visibleLineTexts(hearingBox)).toEqual(visibleLineTexts(dhhBox));
    expect(visibleLineTexts(dhhBox)).toEqual(["こんにちは", "oops"]);
  });

  it("applies the horizontal flip and scale to the hearing container only", () => {
    renderFrame(dhhBox, buildViewModel(fixedFrame("dhh"), CONFIG, 0));
    renderFrame(hearingBox, buildViewModel(fixedFrame("hearing"), CONFIG, 0));
    expect(hearingBox.style.transform).toContain("scaleX(-1)");
    expect(hearingBox.style.transform).toContain("scale(0.5)");
    expect(dhhBox.style.transform).not.toContain("scaleX(-1)");
    expect(dhhBox.style.transform).toContain("scale(1)");
  });

  it("never transforms the controls", () => {
    renderFrame(hearingBox, buildViewModel(fixedFrame("hearing"), CONFIG, 0));
    expect(controls.style.transform).toBe("");
  });

  it("marks retracted lines with the retracted class", () => {
    renderFrame(dhhBox, buildViewModel(fixedFrame("dhh"), CONFIG, 0));
    const lines = dhhBox.querySelectorAll(".caption-line");
    expect(lines[0].classList.contains("retracted")).toBe(false);
    expect(lines[1].classList.contains("retracted")).toBe(true);
  });
});

describe("reveal fidelity", () => {
  it("visible count is non-decreasing and completes at the last offset", () => {
    document.body.innerHTML = '<div id="box"></div>';
    const box = document.getElementById("box")!;
    const frame: FramePayload = {
      face: "dhh",
      mirrored: false,
      scale: 1,
      frame_ts: 0,
      config_rev: 0,
      lines: [
        {
          utterance_id: "u1",
          retracted: false,
          graphemes: ["a", "b", "c"],
          reveal_offsets_ms: [0, 100, 200],
        },
      ],
    };
    renderFrame(box, buildViewModel(frame, CONFIG, 0));

    let previous = 0;
    for (const elapsed of [0, 50, 100, 150, 199, 200, 400]) {
      updateReveals(box, elapsed);
      const visible = countVisibleGraphemes(box);
      expect(visible).toBeGreaterThanOrEqual(previous);
      previous = visible;
    }
    expect(previous).toBe(3);
    expect(updateReveals(box, 200)).toBe(false); // nothing left to reveal

    // Hidden graphemes still occupy layout: revealing never reflows.
    updateReveals(box, 0);
    const spans = box.querySelectorAll<HTMLElement>("span.grapheme");
    expect(spans).toHaveLength(3);
    spans.forEach((span) => expect(span.textContent).not.toBe(""));
  });

  it("keeps hidden graphemes in the DOM (visibility, not removal)", () => {
    document.body.innerHTML = '<div id="box"></div>';
    const box = document.getElementById("box")!;
    const frame = fixedFrame("dhh");
    renderFrame(box, buildViewModel(frame, CONFIG, 0));
    updateReveals(box, -1000); // nothing revealed yet
    expect(countVisibleGraphemes(box)).toBe(0);
    expect(box.querySelectorAll("span.grapheme")).toHaveLength(9);
    expect(visibleLineTexts(box)).toEqual(["こんにちは", "oops"]);
  });
});
