// Avatar pose assembly. The renderer consumes a complete, clamped pose:
// all ten expression channels plus the speaking mouth and the idle
// breathing scale, so downstream geometry never has to range-check.

import { CHANNELS, type Channel, type Weights } from "./protocol.js";
import type { SessionState } from "./viewModel.js";

export const BREATHING_HZ = 0.25;
export const BREATHING_AMPLITUDE = 0.02;

export type AvatarPose = {
  channels: Record<Channel, number>;
  /** Lip-sync drive in [0, 1]; folded into jawOpen while speaking. */
  mouthOpen: number;
  /** Vertical scale factor around 1.0; +/-2% while idle, 1.0 otherwise. */
  breathingScale: number;
};

export function clamp01(value: number): number {
  if (!Number.isFinite(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

export function buildPose(
  weights: Weights,
  state: SessionState,
  mouthOpen: number,
  nowMs: number,
): AvatarPose {
  const channels = {} as Record<Channel, number>;
  for (const channel of CHANNELS) {
    channels[channel] = clamp01(weights[channel] ?? 0);
  }
  const drive = state === "speaking" ? clamp01(mouthOpen) : 0;
  // Speech wins the jaw when it opens wider than the expression does.
  channels.jawOpen = Math.max(channels.jawOpen, drive);
  const breathingScale =
    state === "idle"
      ? 1 + BREATHING_AMPLITUDE * Math.sin(2 * Math.PI * BREATHING_HZ * (nowMs / 1000))
      : 1;
  return { channels, mouthOpen: drive, breathingScale };
}

export function restPose(): AvatarPose {
  return buildPose({}, "speaking", 0, 0);
}
