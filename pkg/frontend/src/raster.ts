// Minimal software rasterizer over the face shape list. It exists so the
// test suite can render reference images without a browser; the browser
// itself paints the same shapes through the canvas API. Output and golden
// files use binary PPM (P6), which needs no image library on either end.

import { FACE_BACKGROUND, type Rgba, type Shape } from "./face.js";

function insideEllipse(
  x: number, y: number,
  cx: number, cy: number, rx: number, ry: number,
): boolean {
  if (rx <= 0 || ry <= 0) return false;
  const dx = (x - cx) / rx;
  const dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1;
}

function insidePolygon(x: number, y: number, points: Array<[number, number]>): boolean {
  let inside = false;
  for (let i = 0, j = points.length - 1; i < points.length; j = i, i += 1) {
    const [xi, yi] = points[i]!;
    const [xj, yj] = points[j]!;
    if (yi > y !== yj > y && x < ((xj - xi) * (y - yi)) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

function blend(dst: Uint8ClampedArray, offset: number, color: Rgba): void {
  const a = Math.min(1, Math.max(0, color.a));
  dst[offset] = Math.round(color.r * a + dst[offset]! * (1 - a));
  dst[offset + 1] = Math.round(color.g * a + dst[offset + 1]! * (1 - a));
  dst[offset + 2] = Math.round(color.b * a + dst[offset + 2]! * (1 - a));
}

/** Render shapes (unit coordinates) to a width*height*3 RGB buffer. */
export function rasterize(
  shapes: Shape[],
  width: number,
  height: number,
): Uint8ClampedArray {
  const rgb = new Uint8ClampedArray(width * height * 3);
  for (let i = 0; i < rgb.length; i += 3) {
    rgb[i] = FACE_BACKGROUND.r;
    rgb[i + 1] = FACE_BACKGROUND.g;
    rgb[i + 2] = FACE_BACKGROUND.b;
  }
  for (let py = 0; py < height; py += 1) {
    const y = (py + 0.5) / height;
    for (let px = 0; px < width; px += 1) {
      const x = (px + 0.5) / width;
      const offset = (py * width + px) * 3;
      for (const shape of shapes) {
        const hit =
          shape.kind === "ellipse"
            ? insideEllipse(x, y, shape.cx, shape.cy, shape.rx, shape.ry)
            : insidePolygon(x, y, shape.points);
        if (hit) blend(rgb, offset, shape.color);
      }
    }
  }
  return rgb;
}

export interface PpmImage {
  width: number;
  height: number;
  rgb: Uint8ClampedArray;
}

export function encodePpm(image: PpmImage): Uint8Array {
  const header = new TextEncoder().encode(
    `P6\n${image.width} ${image.height}\n255\n`,
  );
  const out = new Uint8Array(header.length + image.rgb.length);
  out.set(header, 0);
  out.set(image.rgb, header.length);
  return out;
}

export function decodePpm(data: Uint8Array): PpmImage {
  // Header is exactly the form encodePpm writes: three whitespace-separated
  // fields after the magic, then a single newline before the pixel bytes.
  let pos = 0;
  const fields: string[] = [];
  let current = "";
  while (fields.length < 4 && pos < data.length) {
    const ch = data[pos]!;
    pos += 1;
    if (ch === 0x20 || ch === 0x0a || ch === 0x09 || ch === 0x0d) {
      if (current.length > 0) {
        fields.push(current);
        current = "";
      }
    } else {
      current += String.fromCharCode(ch);
    }
  }
  if (fields[0] !== "P6" || fields[3] !== "255") {
    throw new Error("not a P6 maxval-255 PPM file");
  }
  const width = Number(fields[1]);
  const height = Number(fields[2]);
  if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
    throw new Error("bad PPM dimensions");
  }
  const rgb = new Uint8ClampedArray(data.subarray(pos, pos + width * height * 3));
  if (rgb.length !== width * height * 3) {
    throw new Error("truncated PPM pixel data");
  }
  return { width, height, rgb };
}

/**
 * Fraction of pixels whose channels differ by more than `threshold` levels.
 * Images must share dimensions.
 */
export function diffFraction(
  a: PpmImage,
  b: PpmImage,
  threshold = 8,
): number {
  if (a.width !== b.width || a.height !== b.height) {
    throw new Error("image dimensions differ");
  }
  let differing = 0;
  const pixels = a.width * a.height;
  for (let i = 0; i < pixels; i += 1) {
    const o = i * 3;
    if (
      Math.abs(a.rgb[o]! - b.rgb[o]!) > threshold ||
      Math.abs(a.rgb[o + 1]! - b.rgb[o + 1]!) > threshold ||
      Math.abs(a.rgb[o + 2]! - b.rgb[o + 2]!) > threshold
    ) {
      differing += 1;
    }
  }
  return differing / pixels;
}
