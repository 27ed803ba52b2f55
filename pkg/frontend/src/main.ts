// Browser entry point. Wires the gateway client to the DOM: canvas avatar
// on a requestAnimationFrame loop, chat log, mood badge, thinking timer,
// reconnect banner, and audio playback with the mouth driven off the audio
// element's own clock so lips never drift from sound.

import { GatewayClient } from "./client.js";
import { faceShapes, type Rgba, type Shape } from "./face.js";
import { mouthOpenAt } from "./lipsync.js";
import { buildPose } from "./pose.js";
import type { LipSyncTrack, ServerFrame } from "./protocol.js";
import { initialView, type UiSessionView } from "./viewModel.js";

const FACE_BG = "#f4f0e8";

function rgba(color: Rgba): string {
  return `rgba(${color.r}, ${color.g}, ${color.b}, ${color.a})`;
}

function paintShapes(ctx: CanvasRenderingContext2D, shapes: Shape[]): void {
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  ctx.fillStyle = FACE_BG;
  ctx.fillRect(0, 0, w, h);
  for (const shape of shapes) {
    ctx.fillStyle = rgba(shape.color);
    ctx.beginPath();
    if (shape.kind === "ellipse") {
      ctx.ellipse(shape.cx * w, shape.cy * h, shape.rx * w, shape.ry * h, 0, 0, 2 * Math.PI);
    } else {
      const [first, ...rest] = shape.points;
      if (!first) continue;
      ctx.moveTo(first[0] * w, first[1] * h);
      for (const [x, y] of rest) ctx.lineTo(x * w, y * h);
      ctx.closePath();
    }
    ctx.fill();
  }
}

interface SpeechRecognitionLike {
  lang: string;
  interimResults: boolean;
  onresult: ((event: { results: ArrayLike<ArrayLike<{ transcript: string }>> }) => void) | null;
  onend: (() => void) | null;
  start(): void;
  stop(): void;
}

function speechRecognitionCtor(): (new () => SpeechRecognitionLike) | null {
  const w = window as unknown as Record<string, unknown>;
  const ctor = w.SpeechRecognition ?? w.webkitSpeechRecognition;
  return typeof ctor === "function" ? (ctor as new () => SpeechRecognitionLike) : null;
}

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function boot(): void {
  const canvas = element<HTMLCanvasElement>("avatar");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");
  const banner = element<HTMLDivElement>("banner");
  const badge = element<HTMLDivElement>("badge");
  const badgeMood = element<HTMLSpanElement>("badge-mood");
  const badgePips = element<HTMLSpanElement>("badge-pips");
  const status = element<HTMLDivElement>("status");
  const chat = element<HTMLOListElement>("chat");
  const composer = element<HTMLFormElement>("composer");
  const input = element<HTMLInputElement>("say");
  const send = element<HTMLButtonElement>("send");
  const mic = element<HTMLButtonElement>("mic");

  let view: UiSessionView = initialView();
  let track: LipSyncTrack | null = null;
  let thinkingStartedWallMs: number | null = null;
  const audio = new Audio();

  const client = new GatewayClient({
    baseUrl: window.location.origin,
    onView: (next) => {
      if (next.state === "thinking" && view.state !== "thinking") {
        thinkingStartedWallMs = performance.now();
      }
      if (next.state !== "thinking") {
        thinkingStartedWallMs = null;
      }
      view = next;
      renderChrome();
    },
    onBanner: (message) => {
      banner.hidden = message === null;
      banner.textContent = message ?? "";
    },
    onFrame: (frame: ServerFrame) => {
      if (frame.type === "speech_started") {
        track = frame.lipsync;
        audio.src = window.location.origin + frame.audio_ref;
        void audio.play().catch(() => {});
      } else if (frame.type === "speech_finished" || frame.type === "turn_error") {
        track = null;
        audio.pause();
      }
    },
  });

  function renderChrome(): void {
    chat.replaceChildren(
      ...view.chat.map((turn) => {
        const item = document.createElement("li");
        item.className = turn.role;
        item.textContent = turn.text;
        return item;
      }),
    );
    chat.scrollTop = chat.scrollHeight;

    if (view.badge) {
      badge.hidden = false;
      badgeMood.textContent = view.badge.mood;
      badgePips.replaceChildren(
        ...[1, 2, 3].map((level) => {
          const pip = document.createElement("i");
          pip.className = view.badge && level <= view.badge.intensity ? "pip on" : "pip";
          return pip;
        }),
      );
    } else {
      badge.hidden = true;
    }

    const busy = view.state !== "idle" || view.connection !== "open";
    input.disabled = busy;
    send.disabled = busy;
    mic.disabled = busy;

    if (view.lastError) {
      status.textContent = view.lastError;
      status.className = "error";
    } else if (view.state !== "thinking") {
      status.textContent = view.state === "speaking" ? "speaking" : "";
      status.className = "";
    }
  }

  function renderFrame(): void {
    const now = performance.now();
    let mouthOpen = 0;
    if (view.state === "speaking" && track) {
      mouthOpen = mouthOpenAt(track, audio.currentTime * 1000);
    }
    const pose = buildPose(view.weights, view.state, mouthOpen, now);
    paintShapes(ctx as CanvasRenderingContext2D, faceShapes(pose));

    if (view.state === "thinking" && thinkingStartedWallMs !== null) {
      const elapsed = ((now - thinkingStartedWallMs) / 1000).toFixed(1);
      status.textContent = `thinking (${elapsed}s)`;
      status.className = "thinking";
    }
    requestAnimationFrame(renderFrame);
  }

  composer.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    if (client.send({ type: "utterance", text })) {
      input.value = "";
    }
  });

  const recognitionCtor = speechRecognitionCtor();
  if (recognitionCtor) {
    mic.hidden = false;
    mic.addEventListener("click", () => {
      const recognition = new recognitionCtor();
      recognition.lang = navigator.language || "en-US";
      recognition.interimResults = false;
      recognition.onresult = (event) => {
        const transcript = event.results[0]?.[0]?.transcript ?? "";
        if (transcript) client.send({ type: "utterance", text: transcript });
      };
      recognition.onend = null;
      recognition.start();
    });
  }

  client.start();
  requestAnimationFrame(renderFrame);
}

boot();
