// Pure view-model reducer. Every socket frame folds into a UiSessionView;
// the DOM layer only ever renders the latest view, so replaying a recorded
// event stream must land on the same screen the live session showed.

import type { Mood, ServerFrame, Weights } from "./protocol.js";

export type ConnectionState = "connecting" | "open" | "closed";
export type SessionState = "idle" | "thinking" | "speaking";

export interface ChatTurn {
  role: "user" | "agent";
  text: string;
  at_ms: number;
}

export interface MoodBadge {
  mood: Mood;
  intensity: 1 | 2 | 3;
}

export interface SpeechClip {
  audio_ref: string;
  started_at_ms: number;
}

export interface UiSessionView {
  connection: ConnectionState;
  state: SessionState;
  chat: ChatTurn[];
  badge: MoodBadge | null;
  /** Engine clock at ThinkingStarted; null outside a thinking phase. */
  thinkingSince: number | null;
  /** Latest expression weights to pose the avatar with. */
  weights: Weights;
  /** Clip to play when the agent starts speaking; null once idle again. */
  speech: SpeechClip | null;
  lastError: string | null;
}

export function initialView(): UiSessionView {
  return {
    connection: "connecting",
    state: "idle",
    chat: [],
    badge: null,
    thinkingSince: null,
    weights: {},
    speech: null,
    lastError: null,
  };
}

export function setConnection(
  view: UiSessionView,
  connection: ConnectionState,
): UiSessionView {
  return { ...view, connection };
}

/** Fold one server frame into the view. Unknown frames leave it untouched. */
export function applyFrame(view: UiSessionView, frame: ServerFrame): UiSessionView {
  switch (frame.type) {
    case "user_utterance":
      return {
        ...view,
        chat: [...view.chat, { role: "user", text: frame.text, at_ms: frame.at_ms }],
        lastError: null,
      };
    case "thinking_started":
      return { ...view, state: "thinking", thinkingSince: frame.at_ms };
    case "agent_reply":
      return {
        ...view,
        chat: [...view.chat, { role: "agent", text: frame.text, at_ms: frame.at_ms }],
      };
    case "sentiment_updated":
      return {
        ...view,
        badge: { mood: frame.reading.mood, intensity: frame.reading.intensity },
        weights: frame.weights,
      };
    case "speech_started":
      return {
        ...view,
        state: "speaking",
        thinkingSince: null,
        speech: { audio_ref: frame.audio_ref, started_at_ms: frame.at_ms },
      };
    case "speech_finished":
      return { ...view, state: "idle", speech: null };
    case "expression_tick":
      return { ...view, weights: frame.weights };
    case "turn_error":
      // session_busy mirrors a rejected submit; the running turn is intact.
      if (frame.kind === "session_busy") {
        return { ...view, lastError: frame.message };
      }
      return {
        ...view,
        state: "idle",
        thinkingSince: null,
        speech: null,
        lastError: frame.message,
      };
    case "config_updated":
    case "pong":
      return view;
    case "protocol_error":
      return { ...view, lastError: frame.message };
    case "session_closed":
      return { ...view, connection: "closed", state: "idle", speech: null };
    default:
      return view;
  }
}

export function replay(frames: ServerFrame[]): UiSessionView {
  let view = setConnection(initialView(), "open");
  for (const frame of frames) {
    view = applyFrame(view, frame);
  }
  return view;
}

/** Seconds the agent has been thinking, for the elapsed badge. */
export function thinkingElapsedS(view: UiSessionView, nowMs: number): number | null {
  if (view.thinkingSince === null) return null;
  return Math.max(0, (nowMs - view.thinkingSince) / 1000);
}
