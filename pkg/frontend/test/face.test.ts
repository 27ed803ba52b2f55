import { describe, expect, it } from "vitest";

import { faceShapes, type Shape } from "../src/face.js";
import { buildPose } from "../src/pose.js";
import type { Weights } from "../src/protocol.js";

// Palette values used to pick features out of the shape list. These are
// intentionally the renderer's literal colors: if the palette moves, the
// committed golden images move with it and both suites flag the change.
const BROW = { r: 74, g: 50, b: 32 };
const EYE_WHITE = { r: 255, g: 255, b: 255 };
const MOUTH = { r: 110, g: 43, b: 50 };

function shapesFor(weights: Weights): Shape[] {
  return faceShapes(buildPose(weights, "speaking", 0, 0));
}

function polygons(shapes: Shape[], color: { r: number; g: number; b: number }) {
  return shapes.filter(
    (s): s is Extract<Shape, { kind: "polygon" }> =>
      s.kind === "polygon" &&
      s.color.r === color.r && s.color.g === color.g && s.color.b === color.b,
  );
}

function ellipses(shapes: Shape[], color: { r: number; g: number; b: number }) {
  return shapes.filter(
    (s): s is Extract<Shape, { kind: "ellipse" }> =>
      s.kind === "ellipse" &&
      s.color.r === color.r && s.color.g === color.g && s.color.b === color.b,
  );
}

function browEnds(brow: Extract<Shape, { kind: "polygon" }>) {
  // Brow quads run inner-top, outer-top, outer-bottom, inner-bottom.
  const inner = brow.points[0]!;
  const outer = brow.points[1]!;
  return { inner, outer };
}

const NEUTRAL = shapesFor({});

describe("face geometry responds linearly to each channel", () => {
  it("browInnerUp raises only the inner brow ends", () => {
    const posed = polygons(shapesFor({ browInnerUp: 1 }), BROW);
    const rest = polygons(NEUTRAL, BROW);
    expect(posed).toHaveLength(2);
    posed.forEach((brow, i) => {
      const now = browEnds(brow);
      const was = browEnds(rest[i]!);
      expect(now.inner[1]).toBeCloseTo(was.inner[1] - 0.06, 10);
      expect(now.outer[1]).toBeCloseTo(was.outer[1], 10);
    });
    const half = polygons(shapesFor({ browInnerUp: 0.5 }), BROW);
    expect(browEnds(half[0]!).inner[1]).toBeCloseTo(
      browEnds(rest[0]!).inner[1] - 0.03,
      10,
    );
  });

  it("browOuterUp raises only the outer brow ends", () => {
    const posed = polygons(shapesFor({ browOuterUp: 1 }), BROW);
    const rest = polygons(NEUTRAL, BROW);
    posed.forEach((brow, i) => {
      const now = browEnds(brow);
      const was = browEnds(rest[i]!);
      expect(now.outer[1]).toBeLessThan(was.outer[1]);
      expect(now.inner[1]).toBeCloseTo(was.inner[1], 10);
    });
  });

  it("browDown lowers both brow ends", () => {
    const posed = polygons(shapesFor({ browDown: 1 }), BROW);
    const rest = polygons(NEUTRAL, BROW);
    posed.forEach((brow, i) => {
      const now = browEnds(brow);
      const was = browEnds(rest[i]!);
      expect(now.inner[1]).toBeCloseTo(was.inner[1] + 0.05, 10);
      expect(now.outer[1]).toBeCloseTo(was.outer[1] + 0.05, 10);
    });
  });

  it("eyeWide opens and eyeSquint narrows the eye aperture", () => {
    const restRy = ellipses(NEUTRAL, EYE_WHITE)[0]!.ry;
    const wide = ellipses(shapesFor({ eyeWide: 1 }), EYE_WHITE)[0]!.ry;
    const squint = ellipses(shapesFor({ eyeSquint: 1 }), EYE_WHITE)[0]!.ry;
    expect(wide).toBeGreaterThan(restRy);
    expect(squint).toBeLessThan(restRy);
    expect(squint).toBeGreaterThan(0);
    const halfWide = ellipses(shapesFor({ eyeWide: 0.5 }), EYE_WHITE)[0]!.ry;
    expect(halfWide - restRy).toBeCloseTo((wide - restRy) / 2, 10);
  });

  it("noseSneer fades wrinkles in with the channel value", () => {
    const restTranslucent = NEUTRAL.filter((s) => s.color.a < 1);
    expect(restTranslucent).toHaveLength(0);
    const sneer = shapesFor({ noseSneer: 0.6 }).filter((s) => s.color.a < 1);
    expect(sneer).toHaveLength(2);
    for (const wrinkle of sneer) expect(wrinkle.color.a).toBeCloseTo(0.6, 10);
  });

  it("mouthSmile raises and mouthFrown lowers the mouth corners", () => {
    const restCorner = polygons(NEUTRAL, MOUTH)[0]!.points[0]![1];
    const smile = polygons(shapesFor({ mouthSmile: 1 }), MOUTH)[0]!.points[0]![1];
    const frown = polygons(shapesFor({ mouthFrown: 1 }), MOUTH)[0]!.points[0]![1];
    expect(smile).toBeCloseTo(restCorner - 0.07, 10);
    expect(frown).toBeCloseTo(restCorner + 0.06, 10);
  });

  it("upperLipRaise lifts the middle of the upper lip", () => {
    const midMinY = (shapes: Shape[]) =>
      Math.min(
        ...polygons(shapes, MOUTH)[0]!.points
          .filter(([x]) => Math.abs(x - 0.5) < 0.02)
          .map(([, y]) => y),
      );
    expect(midMinY(shapesFor({ upperLipRaise: 1 }))).toBeLessThan(midMinY(NEUTRAL));
  });

  it("jawOpen sets the mouth opening height linearly", () => {
    const height = (shapes: Shape[]) => {
      const ys = polygons(shapes, MOUTH)[0]!.points.map(([, y]) => y);
      return Math.max(...ys) - Math.min(...ys);
    };
    const rest = height(NEUTRAL);
    const open = height(shapesFor({ jawOpen: 1 }));
    const half = height(shapesFor({ jawOpen: 0.5 }));
    expect(open).toBeCloseTo(rest + 0.16, 10);
    expect(half).toBeCloseTo(rest + 0.08, 10);
  });

  it("breathing scales the face vertically about its centre", () => {
    const pose = buildPose({}, "idle", 0, 1000);
    expect(pose.breathingScale).toBeGreaterThan(1);
    const head = faceShapes(pose).find((s) => s.kind === "ellipse")!;
    const restHead = NEUTRAL.find((s) => s.kind === "ellipse")!;
    if (head.kind !== "ellipse" || restHead.kind !== "ellipse") throw new Error("no head");
    expect(head.ry).toBeCloseTo(restHead.ry * pose.breathingScale, 10);
    expect(head.rx).toBeCloseTo(restHead.rx, 10);
  });
});
