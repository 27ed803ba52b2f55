import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { faceShapes } from "../src/face.js";
import { buildPose } from "../src/pose.js";
import { decodePpm, diffFraction, rasterize, type PpmImage } from "../src/raster.js";
import { MOODS, type Mood } from "../src/protocol.js";
import { GOLDEN_SIZE, goldenPath, posedWeights } from "./goldens.js";

function renderMood(mood: Mood): PpmImage {
  const pose = buildPose(posedWeights(mood), "speaking", 0, 0);
  return {
    width: GOLDEN_SIZE,
    height: GOLDEN_SIZE,
    rgb: rasterize(faceShapes(pose), GOLDEN_SIZE, GOLDEN_SIZE),
  };
}

function golden(mood: Mood): PpmImage {
  return decodePpm(new Uint8Array(readFileSync(goldenPath(mood))));
}

describe("golden faces", () => {
  // Every mood at full intensity must render within a 1% pixel budget of
  // its committed reference (channels differing by more than 8 levels).
  for (const mood of MOODS) {
    it(`matches the committed ${mood} reference`, () => {
      const diff = diffFraction(renderMood(mood), golden(mood), 8);
      expect(diff).toBeLessThan(0.01);
    });
  }

  it("gives each mood a visibly distinct face", () => {
    const neutral = renderMood("neutral");
    for (const mood of MOODS) {
      if (mood === "neutral") continue;
      expect(diffFraction(renderMood(mood), neutral, 8)).toBeGreaterThan(0.01);
    }
  });

  it("renders the neutral rest pose with a closed mouth and level brows", () => {
    const shut = renderMood("neutral");
    const openPose = buildPose({ jawOpen: 1 }, "speaking", 0, 0);
    const open: PpmImage = {
      width: GOLDEN_SIZE,
      height: GOLDEN_SIZE,
      rgb: rasterize(faceShapes(openPose), GOLDEN_SIZE, GOLDEN_SIZE),
    };
    expect(diffFraction(open, shut, 8)).toBeGreaterThan(0.005);
  });

  it("opens the jaw wider when the lip-sync drive beats the expression", () => {
    const expressionOnly = buildPose({ jawOpen: 0.4 }, "speaking", 0, 0);
    const withSpeech = buildPose({ jawOpen: 0.4 }, "speaking", 1.0, 0);
    const a = rasterize(faceShapes(expressionOnly), GOLDEN_SIZE, GOLDEN_SIZE);
    const b = rasterize(faceShapes(withSpeech), GOLDEN_SIZE, GOLDEN_SIZE);
    const imageA: PpmImage = { width: GOLDEN_SIZE, height: GOLDEN_SIZE, rgb: a };
    const imageB: PpmImage = { width: GOLDEN_SIZE, height: GOLDEN_SIZE, rgb: b };
    expect(diffFraction(imageA, imageB, 8)).toBeGreaterThan(0.005);
  });
});
