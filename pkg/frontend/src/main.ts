// Page bootstrap. One page serves every role, picked by query string:
//   ?role=dhh      full-size unmirrored captions + design panel
//   ?role=hearing  mirrored scaled captions + error button + panel
//   ?role=control  no captions, error button + design panel + clear
// Two browser windows back to back (dhh + hearing) emulate the two
// faces of a transparent display.

import { ControlChannel } from "./controls.js";
import { parseFrame, type ConfigPayload, type Role, type WireMessage } from "./protocol.js";
import { ReconnectingSession, type ConnectionState } from "./reconnect.js";
import { buildViewModel, renderFrame, startRevealTicker } from "./view.js";

const ROLE_MAP: Record<string, Role> = {
  dhh: "face_dhh",
  hearing: "face_hearing",
  control: "control",
};

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${location.host}/ws`;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(): void {
  const roleParam = new URLSearchParams(location.search).get("role") ?? "dhh";
  const role = ROLE_MAP[roleParam] ?? "face_dhh";
  document.body.dataset.role = roleParam;

  const status = el<HTMLDivElement>("status");
  const captions = el<HTMLDivElement>("captions");
  const errorBadge = el<HTMLDivElement>("error-badge");
  const retractButton = el<HTMLButtonElement>("retract");
  const clearButton = el<HTMLButtonElement>("clear");
  const feedback = el<HTMLDivElement>("feedback");

  if (role === "face_dhh") {
    retractButton.hidden = true; // the dhh face may only change the design
    clearButton.hidden = true;
  }
  if (role === "control") {
    el<HTMLDivElement>("stage").hidden = true;
  }

  let config: ConfigPayload | null = null;
  let stopTicker: (() => void) | null = null;

  const session = new ReconnectingSession(wsUrl(), role, {
    onState: (state: ConnectionState, detail?: string) => {
      status.textContent = detail ? `${state}: ${detail}` : state;
      status.dataset.state = state;
      if (state !== "open") channel.abortAll();
    },
    onMessage: (message: WireMessage) => {
      if (channel.handleReply(message)) return;
      if (message.type === "config") {
        config = message.payload as unknown as ConfigPayload;
        syncPanel(config);
        return;
      }
      if (message.type === "frame" && config) {
        const frame = parseFrame(message.payload);
        if (!frame) {
          errorBadge.hidden = false; // keep the previous frame on screen
          return;
        }
        errorBadge.hidden = true;
        stopTicker?.();
        const vm = buildViewModel(frame, config, performance.now());
        renderFrame(captions, vm);
        stopTicker = startRevealTicker(captions, vm);
      }
    },
  });
  const channel = new ControlChannel((msg) => session.send(msg));

  async function runCommand(button: HTMLButtonElement, action: "retract_last" | "clear") {
    button.disabled = true;
    feedback.textContent = "";
    const result = await channel.sendControl(action);
    button.disabled = false;
    if (!result.ok) {
      feedback.textContent = String(result.payload.message ?? result.payload.code ?? "failed");
    }
  }

  retractButton.addEventListener("click", () => runCommand(retractButton, "retract_last"));
  clearButton.addEventListener("click", () => runCommand(clearButton, "clear"));

  // -- caption design panel -------------------------------------------

  const fields: Array<[string, keyof ConfigPayload, (v: string) => unknown]> = [
    ["cfg-size", "char_size_pt", Number],
    ["cfg-opacity", "opacity", Number],
    ["cfg-rate", "reveal_rate", Number],
    ["cfg-lines", "max_lines", Number],
    ["cfg-width", "line_width", Number],
    ["cfg-scale", "mirror_scale", Number],
    ["cfg-font", "font_id", String],
  ];

  let syncing = false;

  function syncPanel(cfg: ConfigPayload): void {
    syncing = true;
    for (const [id, key] of fields) {
      const input = el<HTMLInputElement>(id);
      if (document.activeElement !== input) input.value = String(cfg[key]);
    }
    syncing = false;
  }

  for (const [id, key, convert] of fields) {
    const input = el<HTMLInputElement>(id);
    input.addEventListener("change", async () => {
      if (syncing) return;
      input.disabled = true;
      feedback.textContent = "";
      const result = await channel.sendControl("config_patch", {
        patch: { [key]: convert(input.value) },
      });
      input.disabled = false;
      if (!result.ok) {
        feedback.textContent = String(result.payload.message ?? "rejected");
        if (config) syncPanel(config); // roll the widget back
      }
    });
  }

  session.connect();
}

boot();
