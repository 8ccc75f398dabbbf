// Caption rendering: frames to DOM, reveal timing, the mirror flip.
//
// The flip is a container-level horizontal transform on the caption
// area only; text data stays canonical and controls are never inside
// the flipped container. Unrevealed graphemes are rendered hidden (not
// removed) so revealing them never reflows the line.

import type { ConfigPayload, FramePayload } from "./protocol.js";

export interface ViewModel {
  face: "dhh" | "hearing";
  lines: FramePayload["lines"];
  style: {
    char_size_pt: number;
    color_rgba: [number, number, number, number];
    opacity: number;
    font_id: string;
  };
  mirrored: boolean;
  scale: number;
  receivedAt: number;
}

export function buildViewModel(
  frame: FramePayload,
  config: ConfigPayload,
  receivedAt: number,
): ViewModel {
  return {
    face: frame.face,
    lines: frame.lines,
    style: {
      char_size_pt: config.char_size_pt,
      color_rgba: config.color_rgba,
      opacity: config.opacity,
      font_id: config.font_id,
    },
    mirrored: frame.mirrored,
    scale: frame.scale,
    receivedAt,
  };
}

/** Replace the caption container's content with the frame's lines. */
export function renderFrame(container: HTMLElement, vm: ViewModel): void {
  const flip = vm.mirrored ? " scaleX(-1)" : "";
  container.style.transform = `scale(${vm.scale})${flip}`;
  const [r, g, b, a] = vm.style.color_rgba;
  container.style.color = `rgba(${r}, ${g}, ${b}, ${a / 255})`;
  container.style.opacity = String(vm.style.opacity);
  container.style.fontSize = `${vm.style.char_size_pt}pt`;
  container.style.fontFamily = vm.style.font_id;

  container.replaceChildren();
  for (const line of vm.lines) {
    const lineEl = document.createElement("div");
    lineEl.className = line.retracted ? "caption-line retracted" : "caption-line";
    lineEl.dataset.utteranceId = line.utterance_id;
    for (let i = 0; i < line.graphemes.length; i++) {
      const span = document.createElement("span");
      span.className = "grapheme";
      span.textContent = line.graphemes[i];
      span.dataset.revealAt = String(line.reveal_offsets_ms[i]);
      lineEl.appendChild(span);
    }
    container.appendChild(lineEl);
  }
  updateReveals(container, 0);
}

/**
 * Show every grapheme whose reveal offset has passed; returns true
 * while hidden graphemes remain (i.e. keep ticking).
 */
export function updateReveals(container: HTMLElement, elapsedMs: number): boolean {
  let pending = false;
  const spans = container.querySelectorAll<HTMLElement>("span.grapheme");
  spans.forEach((span) => {
    const revealAt = Number(span.dataset.revealAt ?? "0");
    if (revealAt <= elapsedMs) {
      span.style.visibility = "visible";
    } else {
      span.style.visibility = "hidden";
      pending = true;
    }
  });
  return pending;
}

/** Visible text of every caption line, top to bottom (test hook). */
export function visibleLineTexts(container: HTMLElement): string[] {
  return Array.from(container.querySelectorAll<HTMLElement>(".caption-line")).map(
    (line) => line.textContent ?? "",
  );
}

export function countVisibleGraphemes(container: HTMLElement): number {
  return Array.from(container.querySelectorAll<HTMLElement>("span.grapheme")).filter(
    (span) => span.style.visibility === "visible",
  ).length;
}

/** Drive reveal updates off the session clock until nothing is hidden. */
export function startRevealTicker(
  container: HTMLElement,
  vm: ViewModel,
  now: () => number = () => performance.now(),
  intervalMs = 33,
): () => void {
  const timer = setInterval(() => {
    if (!updateReveals(container, now() - vm.receivedAt)) {
      clearInterval(timer);
    }
  }, intervalMs);
  updateReveals(container, now() - vm.receivedAt);
  return () => clearInterval(timer);
}
