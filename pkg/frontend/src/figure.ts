/**
 * Minimal figure model shared by the SVG and PNG backends: linear axes,
 * 1-2-5 ticks, line/scatter series, a legend, and optional point markers.
 */

export interface Series {
  kind: "line" | "scatter";
  points: Array<[number, number]>;
  color: string;
  opacity?: number;
  width?: number;
  radius?: number;
  label?: string;
}

export interface Marker {
  x: number;
  y: number;
  color: string;
  radius?: number;
}

export interface Figure {
  width: number;
  height: number;
  title?: string;
  xlabel?: string;
  ylabel?: string;
  series: Series[];
  markers?: Marker[];
}

export const MARGIN = { left: 62, right: 18, top: 30, bottom: 44 };

export interface Transform {
  x: (v: number) => number;
  y: (v: number) => number;
  xTicks: number[];
  yTicks: number[];
  plotLeft: number;
  plotRight: number;
  plotTop: number;
  plotBottom: number;
}

function bounds(fig: Figure): { x0: number; x1: number; y0: number; y1: number } {
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const s of fig.series) {
    for (const [x, y] of s.points) {
      if (x < x0) x0 = x;
      if (x > x1) x1 = x;
      if (y < y0) y0 = y;
      if (y > y1) y1 = y;
    }
  }
  for (const m of fig.markers ?? []) {
    if (m.x < x0) x0 = m.x;
    if (m.x > x1) x1 = m.x;
    if (m.y < y0) y0 = m.y;
    if (m.y > y1) y1 = m.y;
  }
  if (!Number.isFinite(x0) || !Number.isFinite(y0)) {
    throw new Error("figure has no data points");
  }
  if (x0 === x1) { x0 -= 0.5; x1 += 0.5; }
  if (y0 === y1) { y0 -= 0.5; y1 += 0.5; }
  const padY = 0.05 * (y1 - y0);
  return { x0, x1, y0: y0 - padY, y1: y1 + padY };
}

/** ~n ticks at 1-2-5 steps covering [lo, hi] */
export function niceTicks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo;
  const rawStep = span / Math.max(n - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= rawStep) { step = mag * mult; break; }
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export function transform(fig: Figure): Transform {
  const { x0, x1, y0, y1 } = bounds(fig);
  const plotLeft = MARGIN.left;
  const plotRight = fig.width - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = fig.height - MARGIN.bottom;
  return {
    x: (v) => plotLeft + ((v - x0) / (x1 - x0)) * (plotRight - plotLeft),
    y: (v) => plotBottom - ((v - y0) / (y1 - y0)) * (plotBottom - plotTop),
    xTicks: niceTicks(x0, x1),
    yTicks: niceTicks(y0, y1),
    plotLeft,
    plotRight,
    plotTop,
    plotBottom,
  };
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function toSvg(fig: Figure): string {
  const tr = transform(fig);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fig.width}" height="${fig.height}" viewBox="0 0 ${fig.width} ${fig.height}">`
  );
  parts.push(`<rect width="${fig.width}" height="${fig.height}" fill="white"/>`);
  // axes frame and ticks
  parts.push(
    `<rect x="${tr.plotLeft}" y="${tr.plotTop}" width="${tr.plotRight - tr.plotLeft}" height="${tr.plotBottom - tr.plotTop}" fill="none" stroke="#444" stroke-width="1"/>`
  );
  for (const v of tr.xTicks) {
    const x = tr.x(v);
    parts.push(`<line x1="${x}" y1="${tr.plotBottom}" x2="${x}" y2="${tr.plotBottom + 5}" stroke="#444"/>`);
    parts.push(
      `<text x="${x}" y="${tr.plotBottom + 18}" font-size="11" font-family="sans-serif" text-anchor="middle">${formatTick(v)}</text>`
    );
  }
  for (const v of tr.yTicks) {
    const y = tr.y(v);
    parts.push(`<line x1="${tr.plotLeft - 5}" y1="${y}" x2="${tr.plotLeft}" y2="${y}" stroke="#444"/>`);
    parts.push(
      `<text x="${tr.plotLeft - 8}" y="${y + 4}" font-size="11" font-family="sans-serif" text-anchor="end">${formatTick(v)}</text>`
    );
  }
  for (const s of fig.series) {
    const pts = s.points.map(([x, y]) => `${tr.x(x).toFixed(2)},${tr.y(y).toFixed(2)}`);
    if (s.kind === "line") {
      parts.push(
        `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1}" stroke-opacity="${s.opacity ?? 1}"/>`
      );
    } else {
      const r = s.radius ?? 2.2;
      for (const p of pts) {
        const [px, py] = p.split(",");
        parts.push(`<circle cx="${px}" cy="${py}" r="${r}" fill="${s.color}" fill-opacity="${s.opacity ?? 0.8}"/>`);
      }
    }
  }
  for (const m of fig.markers ?? []) {
    parts.push(`<circle cx="${tr.x(m.x).toFixed(2)}" cy="${tr.y(m.y).toFixed(2)}" r="${m.radius ?? 4}" fill="${m.color}"/>`);
  }
  // legend
  const labeled = fig.series.filter((s) => s.label);
  if (labeled.length) {
    let ly = tr.plotTop + 8;
    const lx = tr.plotRight - 96;
    for (const s of labeled) {
      parts.push(`<rect x="${lx}" y="${ly - 5}" width="18" height="4" fill="${s.color}"/>`);
      parts.push(
        `<text x="${lx + 24}" y="${ly}" font-size="11" font-family="sans-serif">${esc(s.label!)}</text>`
      );
      ly += 16;
    }
  }
  if (fig.title) {
    parts.push(
      `<text x="${fig.width / 2}" y="18" font-size="13" font-family="sans-serif" text-anchor="middle">${esc(fig.title)}</text>`
    );
  }
  if (fig.xlabel) {
    parts.push(
      `<text x="${(tr.plotLeft + tr.plotRight) / 2}" y="${fig.height - 8}" font-size="12" font-family="sans-serif" text-anchor="middle">${esc(fig.xlabel)}</text>`
    );
  }
  if (fig.ylabel) {
    const x = 14;
    const y = (tr.plotTop + tr.plotBottom) / 2;
    parts.push(
      `<text x="${x}" y="${y}" font-size="12" font-family="sans-serif" text-anchor="middle" transform="rotate(-90 ${x} ${y})">${esc(fig.ylabel)}</text>`
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
