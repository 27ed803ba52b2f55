// Wire types for the gateway's event stream. Field names mirror the
// server's snake_case JSON exactly; parsing is defensive because a frame
// that fails a guard should be dropped, not crash the render loop.

export const MOODS = [
  "neutral", "happy", "sad", "angry", "fearful", "surprised", "disgust",
] as const;
export type Mood = (typeof MOODS)[number];

export const CHANNELS = [
  "browInnerUp", "browDown", "browOuterUp", "eyeWide", "eyeSquint",
  "noseSneer", "upperLipRaise", "mouthSmile", "mouthFrown", "jawOpen",
] as const;
export type Channel = (typeof CHANNELS)[number];

// Channels at zero are omitted on the wire; {} is the neutral pose.
export type Weights = Partial<Record<Channel, number>>;

export interface SentimentReading {
  mood: Mood;
  intensity: 1 | 2 | 3;
  degraded: boolean;
  raw: string;
}

export interface LipSyncFrame {
  t_ms: number;
  mouth_open: number;
}

export interface LipSyncTrack {
  duration_ms: number;
  frames: LipSyncFrame[];
}

interface EventBase {
  session: string;
  at_ms: number;
}

export type ServerEvent =
  | (EventBase & { type: "user_utterance"; text: string })
  | (EventBase & { type: "thinking_started" })
  | (EventBase & { type: "agent_reply"; text: string })
  | (EventBase & {
      type: "sentiment_updated";
      reading: SentimentReading;
      weights: Weights;
    })
  | (EventBase & {
      type: "speech_started";
      audio_ref: string;
      lipsync: LipSyncTrack;
    })
  | (EventBase & { type: "speech_finished" })
  | (EventBase & { type: "expression_tick"; weights: Weights })
  | (EventBase & { type: "turn_error"; kind: string; message: string });

// Non-event frames the server can send on the same socket.
export type ControlFrame =
  | { type: "pong" }
  | {
      type: "config_updated";
      session: string;
      decay_hold_ms: number;
      decay_decay_ms: number;
    }
  | { type: "protocol_error"; message: string }
  | { type: "session_closed"; session: string };

export type ServerFrame = ServerEvent | ControlFrame;

export type ClientCommand =
  | { type: "utterance"; text: string }
  | { type: "set_config"; decay_hold_ms?: number; decay_decay_ms?: number }
  | { type: "ping" };

const EVENT_TYPES = new Set([
  "user_utterance", "thinking_started", "agent_reply", "sentiment_updated",
  "speech_started", "speech_finished", "expression_tick", "turn_error",
]);
const CONTROL_TYPES = new Set([
  "pong", "config_updated", "protocol_error", "session_closed",
]);

export function isMood(value: unknown): value is Mood {
  return typeof value === "string" && (MOODS as readonly string[]).includes(value);
}

function isWeights(value: unknown): value is Weights {
  if (typeof value !== "object" || value === null) return false;
  return Object.entries(value).every(
    ([key, v]) =>
      (CHANNELS as readonly string[]).includes(key) &&
      typeof v === "number" && Number.isFinite(v),
  );
}

function isReading(value: unknown): value is SentimentReading {
  if (typeof value !== "object" || value === null) return false;
  const r = value as Record<string, unknown>;
  return (
    isMood(r.mood) &&
    (r.intensity === 1 || r.intensity === 2 || r.intensity === 3) &&
    typeof r.degraded === "boolean"
  );
}

function isTrack(value: unknown): value is LipSyncTrack {
  if (typeof value !== "object" || value === null) return false;
  const t = value as Record<string, unknown>;
  return (
    typeof t.duration_ms === "number" &&
    Array.isArray(t.frames) &&
    t.frames.every(
      (f) =>
        typeof f === "object" && f !== null &&
        typeof (f as LipSyncFrame).t_ms === "number" &&
        typeof (f as LipSyncFrame).mouth_open === "number",
    )
  );
}

/** Parse one raw socket frame; null for anything malformed or unknown. */
export function parseFrame(raw: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const frame = data as Record<string, unknown>;
  const type = frame.type;
  if (typeof type !== "string") return null;

  if (CONTROL_TYPES.has(type)) {
    if (type === "protocol_error" && typeof frame.message !== "string") return null;
    return frame as unknown as ControlFrame;
  }
  if (!EVENT_TYPES.has(type)) return null;
  if (typeof frame.session !== "string" || typeof frame.at_ms !== "number") {
    return null;
  }

  switch (type) {
    case "user_utterance":
    case "agent_reply":
      return typeof frame.text === "string" ? (frame as unknown as ServerEvent) : null;
    case "sentiment_updated":
      return isReading(frame.reading) && isWeights(frame.weights)
        ? (frame as unknown as ServerEvent)
        : null;
    case "speech_started":
      return typeof frame.audio_ref === "string" && isTrack(frame.lipsync)
        ? (frame as unknown as ServerEvent)
        : null;
    case "expression_tick":
      return isWeights(frame.weights) ? (frame as unknown as ServerEvent) : null;
    case "turn_error":
      return typeof frame.kind === "string" && typeof frame.message === "string"
        ? (frame as unknown as ServerEvent)
        : null;
    default:
      return frame as unknown as ServerEvent;
  }
}

export function isServerEvent(frame: ServerFrame): frame is ServerEvent {
  return EVENT_TYPES.has(frame.type);
}
