// Regenerates the golden face images in test/goldens/. Run via
// `npm run goldens` after a deliberate change to the face geometry or
// palette, then re-run the tests and review the diff before committing.

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { faceShapes } from "../src/face.js";
import { buildPose } from "../src/pose.js";
import { encodePpm, rasterize } from "../src/raster.js";
import { MOODS } from "../src/protocol.js";
import { GOLDEN_SIZE, goldenPath, posedWeights } from "./goldens.js";

const dir = join(dirname(fileURLToPath(import.meta.url)), "goldens");
mkdirSync(dir, { recursive: true });

for (const mood of MOODS) {
  const pose = buildPose(posedWeights(mood), "speaking", 0, 0);
  const rgb = rasterize(faceShapes(pose), GOLDEN_SIZE, GOLDEN_SIZE);
  const bytes = encodePpm({ width: GOLDEN_SIZE, height: GOLDEN_SIZE, rgb });
  writeFileSync(goldenPath(mood), bytes);
  console.log(`wrote ${goldenPath(mood)}`);
}
