// Stylized face geometry. A pose maps to a flat list of fill shapes in a
// unit coordinate space (x right, y down); the canvas renderer and the
// software rasterizer both consume this list, so what the tests rasterize
// is exactly what the browser draws.
//
// Every channel displaces its feature linearly with the channel value:
// brow channels move brow endpoints, eyeWide/eyeSquint scale the eye
// aperture, noseSneer fades wrinkles in, upperLipRaise lifts the upper
// lip, mouthSmile/mouthFrown curve the corners, and jawOpen (already fused
// with the lip-sync drive) sets the mouth opening height.

import type { AvatarPose } from "./pose.js";

export interface Rgba {
  r: number;
  g: number;
  b: number;
  a: number;
}

export type Shape =
  | { kind: "ellipse"; cx: number; cy: number; rx: number; ry: number; color: Rgba }
  | { kind: "polygon"; points: Array<[number, number]>; color: Rgba };

export const FACE_BACKGROUND: Rgba = { r: 244, g: 240, b: 232, a: 1 };

const SKIN: Rgba = { r: 242, g: 199, b: 150, a: 1 };
const SKIN_SHADE: Rgba = { r: 214, g: 160, b: 108, a: 1 };
const BROW: Rgba = { r: 74, g: 50, b: 32, a: 1 };
const EYE_WHITE: Rgba = { r: 255, g: 255, b: 255, a: 1 };
const PUPIL: Rgba = { r: 43, g: 43, b: 43, a: 1 };
const MOUTH: Rgba = { r: 110, g: 43, b: 50, a: 1 };

const FACE_CY = 0.52;

const EYE_Y = 0.44;
const EYE_DX = 0.14;
const EYE_RX = 0.075;
const EYE_RY = 0.045;

const BROW_Y = 0.345;
const BROW_HALF_W = 0.08;
const BROW_THICKNESS = 0.022;

const MOUTH_Y = 0.68;
const MOUTH_HALF_W = 0.13;

function quadBezier(
  p0: [number, number],
  control: [number, number],
  p2: [number, number],
  steps: number,
): Array<[number, number]> {
  const points: Array<[number, number]> = [];
  for (let i = 0; i <= steps; i += 1) {
    const t = i / steps;
    const u = 1 - t;
    points.push([
      u * u * p0[0] + 2 * u * t * control[0] + t * t * p2[0],
      u * u * p0[1] + 2 * u * t * control[1] + t * t * p2[1],
    ]);
  }
  return points;
}

/** Control point so the quadratic passes through `mid` at t = 0.5. */
function throughMid(
  p0: [number, number],
  mid: [number, number],
  p2: [number, number],
): [number, number] {
  return [2 * mid[0] - (p0[0] + p2[0]) / 2, 2 * mid[1] - (p0[1] + p2[1]) / 2];
}

function brow(innerX: number, outerX: number, c: AvatarPose["channels"]): Shape {
  const innerY = BROW_Y - 0.06 * c.browInnerUp + 0.05 * c.browDown;
  const outerY = BROW_Y - 0.05 * c.browOuterUp + 0.05 * c.browDown;
  return {
    kind: "polygon",
    points: [
      [innerX, innerY],
      [outerX, outerY],
      [outerX, outerY + BROW_THICKNESS],
      [innerX, innerY + BROW_THICKNESS],
    ],
    color: BROW,
  };
}

function eye(cx: number, c: AvatarPose["channels"]): Shape[] {
  const ry = EYE_RY * (1 + 0.9 * c.eyeWide - 0.75 * c.eyeSquint);
  const pupilR = 0.018;
  return [
    { kind: "ellipse", cx, cy: EYE_Y, rx: EYE_RX, ry, color: EYE_WHITE },
    {
      kind: "ellipse",
      cx,
      cy: EYE_Y,
      rx: pupilR,
      ry: Math.min(pupilR, ry * 0.9),
      color: PUPIL,
    },
  ];
}

function nose(c: AvatarPose["channels"]): Shape[] {
  const shapes: Shape[] = [
    {
      kind: "polygon",
      points: [
        [0.475, 0.56],
        [0.525, 0.56],
        [0.5, 0.47],
      ],
      color: SKIN_SHADE,
    },
  ];
  if (c.noseSneer > 0) {
    const wrinkle = { ...SKIN_SHADE, a: c.noseSneer };
    for (const side of [-1, 1]) {
      shapes.push({
        kind: "polygon",
        points: [
          [0.5 + side * 0.04, 0.5],
          [0.5 + side * 0.085, 0.525],
          [0.5 + side * 0.085, 0.537],
          [0.5 + side * 0.04, 0.512],
        ],
        color: wrinkle,
      });
    }
  }
  return shapes;
}

function mouth(c: AvatarPose["channels"]): Shape {
  const cornerY = MOUTH_Y - 0.07 * c.mouthSmile + 0.06 * c.mouthFrown;
  const left: [number, number] = [0.5 - MOUTH_HALF_W, cornerY];
  const right: [number, number] = [0.5 + MOUTH_HALF_W, cornerY];
  const upperMid: [number, number] = [0.5, MOUTH_Y - 0.035 * c.upperLipRaise];
  const lowerMid: [number, number] = [0.5, MOUTH_Y + 0.01 + 0.16 * c.jawOpen];
  const upper = quadBezier(left, throughMid(left, upperMid, right), right, 16);
  const lower = quadBezier(right, throughMid(right, lowerMid, left), left, 16);
  return { kind: "polygon", points: [...upper, ...lower], color: MOUTH };
}

/** Vertical scale about the face centre; the idle breathing motion. */
function scaled(shapes: Shape[], s: number): Shape[] {
  if (s === 1) return shapes;
  return shapes.map((shape) => {
    if (shape.kind === "ellipse") {
      return {
        ...shape,
        cy: FACE_CY + (shape.cy - FACE_CY) * s,
        ry: shape.ry * s,
      };
    }
    return {
      ...shape,
      points: shape.points.map(
        ([x, y]): [number, number] => [x, FACE_CY + (y - FACE_CY) * s],
      ),
    };
  });
}

export function faceShapes(pose: AvatarPose): Shape[] {
  const c = pose.channels;
  const shapes: Shape[] = [
    { kind: "ellipse", cx: 0.5, cy: FACE_CY, rx: 0.38, ry: 0.44, color: SKIN },
    brow(0.5 - 0.06, 0.5 - 0.06 - BROW_HALF_W, c),
    brow(0.5 + 0.06, 0.5 + 0.06 + BROW_HALF_W, c),
    ...eye(0.5 - EYE_DX, c),
    ...eye(0.5 + EYE_DX, c),
    ...nose(c),
    mouth(c),
  ];
  return scaled(shapes, pose.breathingScale);
}
