/** Static SVG rendering of a figure model. No DOM, no dependencies. */

import type { Figure, Series } from "./figure.js";

export interface RenderOptions {
  width?: number;
  height?: number;
}

const MARGIN = { top: 42, right: 26, bottom: 54, left: 68 };

// one color per launch power; equalization is carried by the dash pattern
const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];

const fmt = (v: number): string => {
  const s = v.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "").replace(/\.?0+e/, "e") : s;
};

const tickLabel = (v: number): string => {
  const a = Math.abs(v);
  if (a !== 0 && (a < 1e-3 || a >= 1e5)) return v.toExponential(0);
  return String(Number(v.toPrecision(4)));
};

function linearTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const raw = span / count;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => span / s <= count)!;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step) {
    out.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return out;
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); 10 ** e <= hi * (1 + 1e-9); e++) {
    out.push(10 ** e);
  }
  return out.length >= 2 ? out : [lo, hi];
}

interface Scale {
  (v: number): number;
  ticks: number[];
}

function makeScale(lo: number, hi: number, log: boolean,
                   r0: number, r1: number): Scale {
  const [a, b] = log ? [Math.log10(lo), Math.log10(hi)] : [lo, hi];
  const span = b - a || 1;
  const f = ((v: number) => {
    const t = ((log ? Math.log10(v) : v) - a) / span;
    return r0 + t * (r1 - r0);
  }) as Scale;
  f.ticks = log ? logTicks(lo, hi) : linearTicks(lo, hi);
  return f;
}

function finiteExtent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) throw new Error("nothing finite to plot");
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function pad([lo, hi]: [number, number], frac: number, log: boolean): [number, number] {
  if (log) {
    const r = (hi / lo) ** frac;
    return [lo / r, hi * r];
  }
  const d = (hi - lo) * frac;
  return [lo - d, hi + d];
}

function seriesPath(s: Series, sx: Scale, sy: Scale): string {
  let d = "";
  let pen = false;
  for (let i = 0; i < s.x.length; i++) {
    const yv = s.y[i]!;
    if (!Number.isFinite(yv)) {
      pen = false;
      continue;
    }
    d += `${pen ? "L" : "M"}${fmt(sx(s.x[i]!))} ${fmt(sy(yv))}`;
    pen = true;
  }
  return d;
}

function errorBars(s: Series, sx: Scale, sy: Scale, color: string): string {
  const parts: string[] = [];
  for (let i = 0; i < s.x.length; i++) {
    const yv = s.y[i]!;
    const ev = s.err[i]!;
    if (!Number.isFinite(yv) || !Number.isFinite(ev) || ev <= 0) continue;
    const x = fmt(sx(s.x[i]!));
    const y0 = fmt(sy(yv - ev));
    const y1 = fmt(sy(yv + ev));
    parts.push(
      `<path class="errbar" stroke="${color}" fill="none" ` +
      `d="M${x} ${y0}L${x} ${y1}M${Number(x) - 3} ${y0}L${Number(x) + 3} ${y0}` +
      `M${Number(x) - 3} ${y1}L${Number(x) + 3} ${y1}"/>`,
    );
  }
  return parts.join("");
}

export function renderSvg(fig: Figure, opts: RenderOptions = {}): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 480;
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;

  const xs = fig.series.flatMap((s) => s.x);
  const ys = fig.series.flatMap((s) =>
    s.y.flatMap((v, i) => {
      const e = Number.isFinite(s.err[i]!) ? s.err[i]! : 0;
      return Number.isFinite(v) ? [v - e, v + e] : [];
    }),
  );
  const sx = makeScale(...pad(finiteExtent(xs), 0.04, fig.xLog), fig.xLog, x0, x1);
  const sy = makeScale(...pad(finiteExtent(ys), 0.06, false), false, y0, y1);

  const powers = [...new Set(fig.series.map((s) => s.power_dBm))];
  const colorOf = (s: Series) =>
    PALETTE[powers.indexOf(s.power_dBm) % PALETTE.length]!;

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  out.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (fig.spec.title) {
    out.push(
      `<text x="${(x0 + x1) / 2}" y="${y1 - 18}" text-anchor="middle" ` +
      `font-size="14">${escapeXml(fig.spec.title)}</text>`,
    );
  }

  for (const t of sy.ticks) {
    const y = fmt(sy(t));
    out.push(`<line x1="${x0}" y1="${y}" x2="${x1}" y2="${y}" stroke="#ddd"/>`);
    out.push(
      `<text x="${x0 - 8}" y="${y}" text-anchor="end" dominant-baseline="middle">` +
      `${tickLabel(t)}</text>`,
    );
  }
  for (const t of sx.ticks) {
    const x = fmt(sx(t));
    out.push(`<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 5}" stroke="#444"/>`);
    out.push(
      `<text x="${x}" y="${y0 + 20}" text-anchor="middle">${tickLabel(t)}</text>`,
    );
  }
  out.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#444"/>`);
  out.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#444"/>`);

  const xTitle = fig.spec.xAxis === "eta" ? "selection rate" : "launch power [dBm]";
  out.push(
    `<text x="${(x0 + x1) / 2}" y="${height - 14}" text-anchor="middle">` +
    `${xTitle}</text>`,
  );
  out.push(
    `<text transform="rotate(-90)" x="${-(y0 + y1) / 2}" y="18" ` +
    `text-anchor="middle">${fig.spec.yField} [bits/symbol/pol]</text>`,
  );

  for (const s of fig.series) {
    const color = colorOf(s);
    out.push(errorBars(s, sx, sy, color));
    const dash = s.dashed ? ' stroke-dasharray="7 4"' : "";
    const d = seriesPath(s, sx, sy);
    if (d !== "") {
      out.push(
        `<path class="series" fill="none" stroke="${color}" stroke-width="1.8"` +
        `${dash} d="${d}"/>`,
      );
    }
    for (let i = 0; i < s.x.length; i++) {
      if (!Number.isFinite(s.y[i]!)) continue;
      out.push(
        `<circle class="pt" cx="${fmt(sx(s.x[i]!))}" cy="${fmt(sy(s.y[i]!))}" ` +
        `r="2.6" fill="${color}"/>`,
      );
    }
  }

  const lh = 18;
  const lx = x1 - 170;
  let ly = y1 + 8;
  out.push(
    `<rect x="${lx - 10}" y="${ly - 14}" width="180" ` +
    `height="${fig.series.length * lh + 10}" fill="white" fill-opacity="0.85" ` +
    `stroke="#bbb"/>`,
  );
  for (const s of fig.series) {
    const dash = s.dashed ? ' stroke-dasharray="7 4"' : "";
    out.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" ` +
      `stroke="${colorOf(s)}" stroke-width="1.8"${dash}/>`,
    );
    out.push(
      `<text class="legend" x="${lx + 32}" y="${ly}" dominant-baseline="middle">` +
      `${escapeXml(s.label)}</text>`,
    );
    ly += lh;
  }

  out.push("</svg>");
  return out.join("\n");
}

function escapeXml(s: string): string {
  return s.replace(/[<>&"]/g, (c) =>
    c === "<" ? "&lt;" : c === ">" ? "&gt;" : c === "&" ? "&amp;" : "&quot;",
  );
}
