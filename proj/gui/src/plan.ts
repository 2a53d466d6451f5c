// Pure planning helpers shared by the editor and the tests. No DOM access.

export interface Point {
  x: number;
  y: number;
}

export interface Lattice {
  origin: number;
  spacing: number;
  first: number;
  count: number;
  y_min: number;
  y_max: number;
}

export interface Geometry {
  abscissas: number[];
  lattice: Lattice;
  dogleg_limit: number;
  max_decisions: number;
  stand_length: number;
  start: Point;
  initial_dip: number;
}

const DOGLEG_SLACK_DEG = 1e-9;
const toRad = Math.PI / 180;

export function dipDegrees(dy: number, dx: number): number {
  return (Math.atan2(dy, dx) * 180) / Math.PI;
}

export function latticeY(lat: Lattice, node: number): number {
  return lat.origin + (lat.first + node) * lat.spacing;
}

export function latticeIndex(lat: Lattice, y: number): number | null {
  const n = Math.round((y - lat.origin) / lat.spacing) - lat.first;
  if (n < 0 || n >= lat.count) return null;
  return Math.abs(latticeY(lat, n) - y) <= 1e-6 * Math.max(1, lat.spacing) ? n : null;
}

export function withinDogleg(dy: number, dx: number, incomingDip: number, limit: number): boolean {
  return Math.abs(dipDegrees(dy, dx) - incomingDip) <= limit + DOGLEG_SLACK_DEG;
}

// Inclusive node range reachable in one stand; lo > hi when nothing is.
export function legalRange(lat: Lattice, node: number, incomingDip: number, dx: number, limit: number): [number, number] {
  const s = lat.spacing;
  const y0 = latticeY(lat, node);
  const legal = (j: number) => j >= 0 && j < lat.count && withinDogleg(latticeY(lat, j) - y0, dx, incomingDip, limit);
  const loAngle = Math.max(-89, incomingDip - limit) * toRad;
  const hiAngle = Math.min(89, incomingDip + limit) * toRad;
  let lo = Math.max(0, node + Math.ceil((dx * Math.tan(loAngle)) / s - 1e-6));
  let hi = Math.min(lat.count - 1, node + Math.floor((dx * Math.tan(hiAngle)) / s + 1e-6));
  while (lo <= hi && !legal(lo)) ++lo;
  while (legal(lo - 1)) --lo;
  while (hi >= lo && !legal(hi)) --hi;
  while (legal(hi + 1)) ++hi;
  return [lo, hi];
}

export interface ClampResult {
  plan: Point[];
  clamped: boolean;
}

function nearestNode(lat: Lattice, y: number): number {
  const n = Math.round((y - lat.origin) / lat.spacing) - lat.first;
  return Math.min(lat.count - 1, Math.max(0, n));
}

// Re-legalizes a plan from index `from` onward: each point snaps to the lattice and
// then into the cone of its predecessor. Points before `from` are left untouched.
export function clampPlan(geo: Geometry, plan: readonly Point[], from: number, initialDip: number): ClampResult {
  const lat = geo.lattice;
  const out = plan.map((p) => ({ ...p }));
  let clamped = false;
  let dip = initialDip;
  for (let i = 1; i < out.length; ++i) {
    const prev = out[i - 1];
    const dx = out[i].x - prev.x;
    if (i >= from) {
      const prevNode = latticeIndex(lat, prev.y);
      if (prevNode === null) throw new Error(`plan point ${i - 1} is off the lattice`);
      const [lo, hi] = legalRange(lat, prevNode, dip, dx, geo.dogleg_limit);
      if (lo > hi) {
        out.length = i;
        return { plan: out, clamped: true };
      }
      const want = nearestNode(lat, out[i].y);
      const node = Math.min(hi, Math.max(lo, want));
      clamped ||= node !== want;
      out[i].y = latticeY(lat, node);
    }
    dip = dipDegrees(out[i].y - prev.y, dx);
  }
  return { plan: out, clamped };
}

// Moves decision point `index` by `dy` metres and re-clamps everything after it.
// Returns null when the point is already drilled (selection refused).
export function editPlan(geo: Geometry, plan: readonly Point[], drilledCount: number, index: number, dy: number,
                         initialDip: number): ClampResult | null {
  if (index < drilledCount || index >= plan.length) return null;
  const moved = plan.map((p) => ({ ...p }));
  moved[index].y += dy;
  return clampPlan(geo, moved, index, initialDip);
}

// A default plan: hold the current dip from the bit to the last abscissa.
export function extendPlan(geo: Geometry, drilled: readonly Point[], currentDip: number): Point[] {
  const plan = drilled.map((p) => ({ ...p }));
  for (let i = plan.length; i < geo.abscissas.length; ++i) {
    const prev = plan[i - 1];
    const x = geo.abscissas[i];
    plan.push({ x, y: prev.y + (x - prev.x) * Math.tan(currentDip * toRad) });
  }
  return clampPlan(geo, plan, drilled.length, geo.initial_dip).plan;
}

export interface ScoreEntry {
  score: number;
  realization: number;
}

export const DECILES = 9;

// Band b spans [edge b, edge b+1) over edges (min, P10..P90, max); the top band is
// closed and a zero-width band claims scores equal to its value first.
export function bandOf(score: number, edges: readonly number[]): number {
  for (let b = 0; b < DECILES; ++b) {
    const lo = edges[b];
    const hi = edges[b + 1];
    if (score < hi || (score === lo && lo === hi)) return b;
  }
  return DECILES;
}

export function bandEdges(scores: readonly ScoreEntry[], percentiles: readonly number[]): number[] {
  if (percentiles.length !== DECILES) throw new Error(`expected ${DECILES} percentiles`);
  let min = Infinity;
  let max = -Infinity;
  for (const e of scores) {
    min = Math.min(min, e.score);
    max = Math.max(max, e.score);
  }
  return [min, ...percentiles, max];
}

export function selectBand(scores: readonly ScoreEntry[], percentiles: readonly number[], band: number): number[] {
  if (!Number.isInteger(band) || band < 0 || band > DECILES) throw new Error("band index must be in 0..9");
  if (scores.length === 0) return [];
  const edges = bandEdges(scores, percentiles);
  return scores.filter((e) => bandOf(e.score, edges) === band).map((e) => e.realization);
}

// Bars for the distribution chart: one per non-degenerate band, or a single bar when
// every score is equal. Heights are the server's percentile values, not recomputed.
export interface Bar {
  band: number;
  lo: number;
  hi: number;
}

export function distributionBars(scores: readonly ScoreEntry[], percentiles: readonly number[]): Bar[] {
  if (scores.length === 0) return [];
  const edges = bandEdges(scores, percentiles);
  if (edges[0] === edges[edges.length - 1]) return [{ band: 0, lo: edges[0], hi: edges[0] }];
  const bars: Bar[] = [];
  for (let b = 0; b <= DECILES; ++b) bars.push({ band: b, lo: edges[b], hi: edges[b + 1] });
  return bars;
}
