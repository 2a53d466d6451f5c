import { ApiClient } from "./api.js";
import { distributionBars, Point } from "./plan.js";
import { coverage, Frame } from "./raster.js";
import { FinalPanel, SessionController, View, ViewState } from "./session.js";

const LOOK_AROUND = 4.8;

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const section = $<HTMLCanvasElement>("section");
const chart = $<HTMLCanvasElement>("chart");
const banner = $<HTMLDivElement>("banner");
const finalBox = $<HTMLDivElement>("final");

let frame: Frame | null = null;
let chartBands: { band: number; x0: number; x1: number }[] = [];

function fit(canvas: HTMLCanvasElement): CanvasRenderingContext2D {
  const ratio = window.devicePixelRatio || 1;
  const w = canvas.clientWidth;
  const h = canvas.clientHeight;
  if (canvas.width !== Math.round(w * ratio) || canvas.height !== Math.round(h * ratio)) {
    canvas.width = Math.round(w * ratio);
    canvas.height = Math.round(h * ratio);
  }
  const ctx = canvas.getContext("2d")!;
  ctx.setTransform(ratio, 0, 0, ratio, 0, 0);
  return ctx;
}

function drawOverprint(ctx: CanvasRenderingContext2D, s: ViewState, f: Frame) {
  const all = coverage(s.realizations, f);
  const picked = s.highlighted ? coverage(s.realizations, f, s.highlighted) : null;
  const img = ctx.createImageData(f.width, f.height);
  for (let i = 0; i < all.length; ++i) {
    const p = picked ? picked[i] : all[i];
    const dim = picked ? 0.25 * all[i] : 0;
    img.data[4 * i] = 230;
    img.data[4 * i + 1] = 190;
    img.data[4 * i + 2] = 60;
    img.data[4 * i + 3] = Math.round(255 * Math.min(1, p + dim));
  }
  ctx.putImageData(img, 0, 0);
  if (s.truth) {
    ctx.strokeStyle = "#111";
    ctx.lineWidth = 1.5;
    for (const curve of s.truth) polyline(ctx, f, s.realizations.x.map((x, i) => ({ x, y: curve[i] })));
  }
}

function px(f: Frame, p: Point): [number, number] {
  return [((p.x - f.x0) / (f.x1 - f.x0)) * f.width, ((p.y - f.y0) / (f.y1 - f.y0)) * f.height];
}

function polyline(ctx: CanvasRenderingContext2D, f: Frame, pts: Point[]) {
  if (pts.length < 2) return;
  ctx.beginPath();
  pts.forEach((p, i) => (i ? ctx.lineTo(...px(f, p)) : ctx.moveTo(...px(f, p))));
  ctx.stroke();
}

function drawWell(ctx: CanvasRenderingContext2D, s: ViewState, f: Frame) {
  const n = s.drilled.length;
  ctx.lineWidth = 3;
  ctx.strokeStyle = "#e67e22";
  polyline(ctx, f, s.drilled);
  ctx.strokeStyle = "#c0392b";
  polyline(ctx, f, s.plan.slice(n - 1, n + 1));
  ctx.strokeStyle = "#2f6fd6";
  polyline(ctx, f, s.plan.slice(n));
  const ry = (LOOK_AROUND / (f.y1 - f.y0)) * f.height;
  const rx = Math.max(4, ry * 0.35);
  s.plan.forEach((p, i) => {
    if (i < n) return;
    const [cx, cy] = px(f, p);
    ctx.beginPath();
    ctx.ellipse(cx, cy, rx, ry, 0, 0, 2 * Math.PI);
    ctx.lineWidth = i === s.selected ? 2.5 : 1;
    ctx.strokeStyle = i === s.selected ? (s.clamped ? "#c0392b" : "#2f6fd6") : "rgba(47,111,214,0.5)";
    ctx.stroke();
  });
}

function drawChart(s: ViewState) {
  const ctx = fit(chart);
  const w = chart.clientWidth;
  const h = chart.clientHeight;
  ctx.clearRect(0, 0, w, h);
  chartBands = [];
  if (!s.last) return;
  const bars = distributionBars(s.last.scores, s.last.percentiles);
  const prev = s.previous ? distributionBars(s.previous.scores, s.previous.percentiles) : [];
  const values = [...bars, ...prev].flatMap((b) => [b.lo, b.hi]);
  const lo = Math.min(0, ...values);
  const hi = Math.max(1e-9, ...values);
  const yOf = (v: number) => h - 14 - ((v - lo) / (hi - lo)) * (h - 24);
  const slot = w / Math.max(1, bars.length);
  const draw = (list: typeof bars, style: (band: number) => string, inset: number) =>
    list.forEach((b, i) => {
      ctx.fillStyle = style(b.band);
      const top = yOf(Math.max(b.hi, 0));
      ctx.fillRect(i * slot + inset, top, slot - 2 * inset, Math.max(1, yOf(Math.min(b.hi, 0)) - top));
    });
  draw(prev, () => "#c8c8c8", 1);
  draw(bars, (band) => (band === s.band ? "#c0392b" : "#2f6fd6"), slot * 0.2);
  bars.forEach((b, i) => chartBands.push({ band: b.band, x0: i * slot, x1: (i + 1) * slot }));
  ctx.strokeStyle = "#333";
  ctx.beginPath();
  bars.forEach((b, i) => {
    const x = (i + 1) * slot;
    const y = h - 14 - ((i + 1) / bars.length) * (h - 24);
    i ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
  });
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.font = "10px sans-serif";
  bars.forEach((b, i) => ctx.fillText(bars.length === 1 ? "all" : `P${b.band * 10}`, i * slot + 2, h - 2));
}

const view: View = {
  render(s) {
    const ctx = fit(section);
    const w = section.clientWidth;
    const h = section.clientHeight;
    const lat = s.geometry.lattice;
    frame = { width: Math.round(w), height: Math.round(h), x0: s.geometry.abscissas[0],
              x1: s.geometry.abscissas[s.geometry.abscissas.length - 1], y0: lat.y_min, y1: lat.y_max };
    ctx.clearRect(0, 0, w, h);
    drawOverprint(ctx, s, frame);
    drawWell(ctx, s, frame);
    drawChart(s);
    $("status").textContent = `generation ${s.realizations.generation}, ${s.drilled.length - 1} of ${s.geometry.max_decisions} stands drilled`;
  },
  busy(flag) {
    for (const id of ["evaluate", "commit", "stop"]) $<HTMLButtonElement>(id).disabled = flag;
  },
  error(message) {
    banner.textContent = message;
    banner.hidden = false;
  },
  final(panel: FinalPanel) {
    finalBox.hidden = false;
    $("final-score").textContent = panel.score;
    $("final-percent").textContent = panel.percent;
    $("final-rank").textContent = `${panel.rank} of ${panel.finishers}`;
    $("final-optimal").textContent = panel.optimal_score;
    for (const id of ["evaluate", "commit", "stop"]) $<HTMLButtonElement>(id).hidden = true;
  },
};

const controller = new SessionController(new ApiClient(""), view);

function clearBanner() {
  banner.hidden = true;
}

async function loadRounds() {
  const res = await fetch("/rounds");
  const body = await res.json();
  const select = $<HTMLSelectElement>("round");
  for (const r of body.rounds) select.add(new Option(r.round_id, r.round_id));
}

$("start-form").addEventListener("submit", async (ev) => {
  ev.preventDefault();
  clearBanner();
  const round = $<HTMLSelectElement>("round").value;
  const participant = $<HTMLInputElement>("participant").value.trim();
  if (!participant) return view.error("enter a participant name");
  if (await controller.start(round, participant)) {
    $("start-form").hidden = true;
    $("play").hidden = false;
    view.render(controller.state!);
  }
});

section.addEventListener("pointerdown", (ev) => {
  const s = controller.state;
  if (!s || !frame) return;
  const rect = section.getBoundingClientRect();
  let best = -1;
  let dist = Infinity;
  s.plan.forEach((p, i) => {
    const [x, y] = px(frame!, p);
    const d = Math.hypot(x - (ev.clientX - rect.left), y - (ev.clientY - rect.top));
    if (d < dist) [best, dist] = [i, d];
  });
  if (best >= 0 && !controller.select(best)) view.error("drilled points cannot be edited");
});

window.addEventListener("keydown", (ev) => {
  const s = controller.state;
  if (!s || s.finished || (ev.key !== "ArrowUp" && ev.key !== "ArrowDown")) return;
  ev.preventDefault();
  controller.adjust((ev.key === "ArrowUp" ? -1 : 1) * s.geometry.lattice.spacing);
});
$("up").addEventListener("click", () => controller.state && controller.adjust(-controller.state.geometry.lattice.spacing));
$("down").addEventListener("click", () => controller.state && controller.adjust(controller.state.geometry.lattice.spacing));

chart.addEventListener("click", (ev) => {
  const x = ev.clientX - chart.getBoundingClientRect().left;
  const hit = chartBands.find((b) => x >= b.x0 && x < b.x1);
  const s = controller.state;
  if (!s) return;
  controller.chooseBand(hit && hit.band !== s.band ? hit.band : null);
});

$("evaluate").addEventListener("click", () => (clearBanner(), controller.evaluate()));
$("commit").addEventListener("click", () => (clearBanner(), controller.commitNext()));
$("stop").addEventListener("click", () => (clearBanner(), controller.stop()));
window.addEventListener("resize", () => controller.state && view.render(controller.state));

loadRounds().catch((e) => view.error(`cannot reach server: ${e}`));
