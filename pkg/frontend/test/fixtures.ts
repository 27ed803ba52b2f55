// Loaders for the recorded fixtures. events.jsonl and transcript.jsonl are
// the byte-stable output of the engine's offline simulation of the bundled
// three-mood scenario; mood_weights.json is the engine's channel table for
// every mood at full intensity, i.e. what a sentiment_updated frame carries.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { parseFrame, type Mood, type ServerFrame, type Weights } from "../src/protocol.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export function fixturePath(name: string): string {
  return join(HERE, "fixtures", name);
}

export function readJsonl(name: string): unknown[] {
  return readFileSync(fixturePath(name), "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as unknown);
}

export function fixtureEvents(): ServerFrame[] {
  const raw = readFileSync(fixturePath("events.jsonl"), "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0);
  return raw.map((line, index) => {
    const frame = parseFrame(line);
    if (frame === null) throw new Error(`events.jsonl line ${index + 1} did not parse`);
    return frame;
  });
}

export interface TranscriptRecord {
  session: string;
  at_ms: number;
  kind: "turn" | "sentiment";
  payload: Record<string, unknown>;
}

export function fixtureTranscript(): TranscriptRecord[] {
  return readJsonl("transcript.jsonl") as TranscriptRecord[];
}

export function moodWeights(): Record<Mood, Weights> {
  return JSON.parse(readFileSync(fixturePath("mood_weights.json"), "utf-8")) as Record<
    Mood,
    Weights
  >;
}
