import type { RealizationsPayload } from "./api.js";

export interface Frame {
  width: number;
  height: number;
  x0: number;
  x1: number;
  y0: number; // depth at the top row
  y1: number; // depth at the bottom row
}

export function sampleAt(xs: readonly number[], values: readonly number[], x: number): number {
  if (x <= xs[0]) return values[0];
  const n = xs.length;
  if (x >= xs[n - 1]) return values[n - 1];
  let lo = 0;
  let hi = n - 1;
  while (hi - lo > 1) {
    const mid = (lo + hi) >> 1;
    if (xs[mid] <= x) lo = mid;
    else hi = mid;
  }
  const t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

// Fraction of members (optionally a subset) inside a sand at each pixel, row-major.
export function coverage(payload: RealizationsPayload, frame: Frame, members?: readonly number[]): Float32Array {
  const out = new Float32Array(frame.width * frame.height);
  const chosen = members ?? payload.realizations.map((_, i) => i);
  if (chosen.length === 0) return out;
  const rowDepth = (frame.y1 - frame.y0) / frame.height;
  for (let c = 0; c < frame.width; ++c) {
    const x = frame.x0 + ((c + 0.5) * (frame.x1 - frame.x0)) / frame.width;
    for (const m of chosen) {
      const b = payload.realizations[m].boundaries;
      for (const roof of [0, 2]) {
        const top = sampleAt(payload.x, b[roof], x);
        const base = sampleAt(payload.x, b[roof + 1], x);
        const r0 = Math.max(0, Math.ceil((top - frame.y0) / rowDepth - 0.5));
        const r1 = Math.min(frame.height - 1, Math.floor((base - frame.y0) / rowDepth - 0.5));
        for (let r = r0; r <= r1; ++r) out[r * frame.width + c] += 1;
      }
    }
  }
  const scale = 1 / chosen.length;
  for (let i = 0; i < out.length; ++i) out[i] *= scale;
  return out;
}

// Sum over a pixel column of p(1 - p): zero where all members agree, larger where the
// overprint is blurred.
export function columnVariance(cov: Float32Array, frame: Frame, column: number): number {
  let total = 0;
  for (let r = 0; r < frame.height; ++r) {
    const p = cov[r * frame.width + column];
    total += p * (1 - p);
  }
  return total;
}

export function columnOf(frame: Frame, x: number): number {
  const c = Math.floor(((x - frame.x0) / (frame.x1 - frame.x0)) * frame.width);
  return Math.min(frame.width - 1, Math.max(0, c));
}
