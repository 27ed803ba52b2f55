// Lip-sync sampling. The track is a sparse list of envelope frames; the
// mouth follows whichever frame the audio playback clock has most recently
// passed, so the animation stays glued to the audio element rather than to
// wall time.

import type { LipSyncTrack } from "./protocol.js";

/** Envelope value at playback time t_ms: the latest frame at or before it. */
export function mouthOpenAt(track: LipSyncTrack, tMs: number): number {
  if (tMs < 0 || tMs >= track.duration_ms) return 0;
  let value = 0;
  for (const frame of track.frames) {
    if (frame.t_ms > tMs) break;
    value = frame.mouth_open;
  }
  return value;
}
