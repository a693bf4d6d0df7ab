// Rasterizes sketch-pad strokes into the 28x28 grayscale layout the
// classifiers were trained on: white ink on black, content scaled to fit
// a 20x20 box, then shifted so its center of mass sits at the frame
// center. Pure math so it is testable without a canvas.

export interface Point {
  x: number;
  y: number;
}

export type Stroke = Point[];

function distanceToSegment(px: number, py: number, a: Point, b: Point): number {
  const dx = b.x - a.x;
  const dy = b.y - a.y;
  const lengthSq = dx * dx + dy * dy;
  let t = 0;
  if (lengthSq > 0) {
    t = ((px - a.x) * dx + (py - a.y) * dy) / lengthSq;
    t = Math.max(0, Math.min(1, t));
  }
  const cx = a.x + t * dx;
  const cy = a.y + t * dy;
  return Math.hypot(px - cx, py - cy);
}

/** Paint strokes as white ink of the given radius onto a square grid. */
export function paintStrokes(
  strokes: Stroke[],
  size: number,
  radius: number,
): Float32Array {
  const grid = new Float32Array(size * size);
  for (const stroke of strokes) {
    if (stroke.length === 0) continue;
    const segments: Array<[Point, Point]> =
      stroke.length === 1
        ? [[stroke[0], stroke[0]]]
        : stroke.slice(1).map((p, i) => [stroke[i], p] as [Point, Point]);
    for (const [a, b] of segments) {
      const minX = Math.max(0, Math.floor(Math.min(a.x, b.x) - radius));
      const maxX = Math.min(size - 1, Math.ceil(Math.max(a.x, b.x) + radius));
      const minY = Math.max(0, Math.floor(Math.min(a.y, b.y) - radius));
      const maxY = Math.min(size - 1, Math.ceil(Math.max(a.y, b.y) + radius));
      for (let y = minY; y <= maxY; y++) {
        for (let x = minX; x <= maxX; x++) {
          const d = distanceToSegment(x + 0.5, y + 0.5, a, b);
          if (d <= radius) grid[y * size + x] = 255;
          else if (d <= radius + 1) {
            // one-pixel soft edge so downsampling antialiases
            const value = 255 * (radius + 1 - d);
            const idx = y * size + x;
            if (value > grid[idx]) grid[idx] = value;
          }
        }
      }
    }
  }
  return grid;
}

function boundingBox(grid: Float32Array, size: number) {
  let minX = size, minY = size, maxX = -1, maxY = -1;
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      if (grid[y * size + x] > 0) {
        if (x < minX) minX = x;
        if (x > maxX) maxX = x;
        if (y < minY) minY = y;
        if (y > maxY) maxY = y;
      }
    }
  }
  return maxX < 0 ? null : { minX, minY, maxX, maxY };
}

/**
 * Strokes in [0, canvasSize) coordinates -> 784 bytes, row-major 28x28.
 * A blank canvas maps to 784 zero bytes (still a valid prediction input).
 */
export function rasterizeStrokes(
  strokes: Stroke[],
  canvasSize: number,
): Uint8Array {
  const radius = canvasSize / 22;
  const grid = paintStrokes(strokes, canvasSize, radius);
  const out = new Uint8Array(784);
  const box = boundingBox(grid, canvasSize);
  if (box === null) return out;

  // scale the ink bounding box to fit 20x20, preserving aspect ratio
  const boxW = box.maxX - box.minX + 1;
  const boxH = box.maxY - box.minY + 1;
  const scale = 20 / Math.max(boxW, boxH);

  const scaled = new Float32Array(28 * 28);
  for (let y = 0; y < 28; y++) {
    for (let x = 0; x < 28; x++) {
      // average source pixels landing in this destination cell
      const sx0 = box.minX + (x - 4) / scale;
      const sy0 = box.minY + (y - 4) / scale;
      const sx1 = sx0 + 1 / scale;
      const sy1 = sy0 + 1 / scale;
      let total = 0;
      let count = 0;
      for (let sy = Math.floor(sy0); sy < sy1; sy++) {
        for (let sx = Math.floor(sx0); sx < sx1; sx++) {
          if (sx < 0 || sy < 0 || sx >= canvasSize || sy >= canvasSize) continue;
          total += grid[sy * canvasSize + sx];
          count += 1;
        }
      }
      scaled[y * 28 + x] = count > 0 ? total / count : 0;
    }
  }

  // shift so the center of mass lands on the frame center
  let mass = 0, mx = 0, my = 0;
  for (let y = 0; y < 28; y++) {
    for (let x = 0; x < 28; x++) {
      const v = scaled[y * 28 + x];
      mass += v;
      mx += v * x;
      my += v * y;
    }
  }
  const shiftX = Math.round(13.5 - mx / mass);
  const shiftY = Math.round(13.5 - my / mass);
  for (let y = 0; y < 28; y++) {
    for (let x = 0; x < 28; x++) {
      const srcX = x - shiftX;
      const srcY = y - shiftY;
      if (srcX < 0 || srcY < 0 || srcX >= 28 || srcY >= 28) continue;
      out[y * 28 + x] = Math.min(255, Math.round(scaled[srcY * 28 + srcX]));
    }
  }
  return out;
}
