/**
 * PNG backend: rasterizes the figure model onto an RGBA buffer (rendered at
 * 2x the logical size for ~150 dpi output) and encodes it with pngjs.
 *
 * Tick numbers and legend entries are drawn with a built-in 5x7 bitmap font
 * covering digits and the handful of symbols the labels use; richer text
 * (titles, axis names) is an SVG-only nicety.
 */
import { PNG } from "pngjs";

import { Figure, formatTick, transform } from "./figure";

type Rgba = [number, number, number, number]; // 0..255, alpha 0..1 handled at call sites

// 5x7 glyphs, one byte per row, low 5 bits = columns (MSB left)
const FONT: Record<string, number[]> = {
  "0": [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  "1": [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  "2": [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  "3": [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  "4": [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  "5": [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  "6": [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  "7": [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  "8": [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  "9": [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  L: [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1f],
  "=": [0x00, 0x00, 0x1f, 0x00, 0x1f, 0x00, 0x00],
  ".": [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  "-": [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  ",": [0x00, 0x00, 0x00, 0x00, 0x0c, 0x04, 0x08],
  e: [0x00, 0x00, 0x0e, 0x11, 0x1f, 0x10, 0x0e],
  "+": [0x00, 0x04, 0x04, 0x1f, 0x04, 0x04, 0x00],
  " ": [0, 0, 0, 0, 0, 0, 0],
};

export function hexColor(spec: string): Rgba {
  const m = /^#([0-9a-fA-F]{6})$/.exec(spec);
  if (!m) return [0, 0, 0, 255];
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff, 255];
}

export class Raster {
  readonly w: number;
  readonly h: number;
  readonly data: Uint8ClampedArray;

  constructor(w: number, h: number) {
    this.w = w;
    this.h = h;
    this.data = new Uint8ClampedArray(w * h * 4).fill(255);
  }

  blend(x: number, y: number, c: Rgba, alpha: number): void {
    if (x < 0 || y < 0 || x >= this.w || y >= this.h) return;
    const i = (y * this.w + x) * 4;
    const a = alpha;
    this.data[i] = c[0] * a + this.data[i] * (1 - a);
    this.data[i + 1] = c[1] * a + this.data[i + 1] * (1 - a);
    this.data[i + 2] = c[2] * a + this.data[i + 2] * (1 - a);
    this.data[i + 3] = 255;
  }

  disc(cx: number, cy: number, r: number, c: Rgba, alpha = 1): void {
    const r2 = r * r;
    for (let y = Math.floor(cy - r); y <= cy + r; y++) {
      for (let x = Math.floor(cx - r); x <= cx + r; x++) {
        const d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        if (d2 <= r2) this.blend(x, y, c, alpha);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, c: Rgba, width = 1, alpha = 1): void {
    const dx = x1 - x0;
    const dy = y1 - y0;
    const len = Math.hypot(dx, dy);
    const steps = Math.max(1, Math.ceil(len));
    const r = width / 2;
    // stamped discs; cheap and good enough at 2x supersampling
    for (let s = 0; s <= steps; s++) {
      const x = x0 + (dx * s) / steps;
      const y = y0 + (dy * s) / steps;
      if (r <= 0.6) this.blend(Math.round(x), Math.round(y), c, alpha);
      else this.disc(x, y, r, c, alpha);
    }
  }

  rect(x0: number, y0: number, w: number, h: number, c: Rgba, alpha = 1): void {
    for (let y = y0; y < y0 + h; y++) for (let x = x0; x < x0 + w; x++) this.blend(x, y, c, alpha);
  }

  frame(x0: number, y0: number, x1: number, y1: number, c: Rgba): void {
    this.line(x0, y0, x1, y0, c, 1);
    this.line(x0, y1, x1, y1, c, 1);
    this.line(x0, y0, x0, y1, c, 1);
    this.line(x1, y0, x1, y1, c, 1);
  }

  /** 5x7 bitmap text; unknown characters are skipped. scale >= 1 integer. */
  text(x: number, y: number, s: string, c: Rgba, scale = 2): void {
    let cx = x;
    for (const ch of s) {
      const glyph = FONT[ch];
      if (glyph) {
        for (let row = 0; row < 7; row++) {
          for (let col = 0; col < 5; col++) {
            if ((glyph[row] >> (4 - col)) & 1) {
              this.rect(cx + col * scale, y + row * scale, scale, scale, c);
            }
          }
        }
      }
      cx += 6 * scale;
    }
  }

  textWidth(s: string, scale = 2): number {
    return s.length * 6 * scale;
  }
}

export function toPngBuffer(fig: Figure, scale = 2): Buffer {
  const tr = transform(fig);
  const r = new Raster(fig.width * scale, fig.height * scale);
  const axis = hexColor("#444444");
  const sx = (v: number) => tr.x(v) * scale;
  const sy = (v: number) => tr.y(v) * scale;

  r.frame(tr.plotLeft * scale, tr.plotTop * scale, tr.plotRight * scale, tr.plotBottom * scale, axis);
  for (const v of tr.xTicks) {
    const x = sx(v);
    r.line(x, tr.plotBottom * scale, x, tr.plotBottom * scale + 5 * scale, axis);
    const label = formatTick(v);
    r.text(x - r.textWidth(label) / 2, tr.plotBottom * scale + 8 * scale, label, axis);
  }
  for (const v of tr.yTicks) {
    const y = sy(v);
    r.line(tr.plotLeft * scale - 5 * scale, y, tr.plotLeft * scale, y, axis);
    const label = formatTick(v);
    r.text(tr.plotLeft * scale - 7 * scale - r.textWidth(label), y - 3.5 * scale, label, axis);
  }
  for (const s of fig.series) {
    const c = hexColor(s.color);
    const alpha = s.opacity ?? 1;
    if (s.kind === "line") {
      const w = (s.width ?? 1) * scale;
      for (let i = 1; i < s.points.length; i++) {
        const [ax, ay] = s.points[i - 1];
        const [bx, by] = s.points[i];
        r.line(sx(ax), sy(ay), sx(bx), sy(by), c, w, alpha);
      }
    } else {
      const rad = (s.radius ?? 2.2) * scale;
      for (const [px, py] of s.points) r.disc(sx(px), sy(py), rad, c, s.opacity ?? 0.8);
    }
  }
  for (const m of fig.markers ?? []) {
    r.disc(sx(m.x), sy(m.y), (m.radius ?? 4) * scale, hexColor(m.color));
  }
  const labeled = fig.series.filter((s) => s.label);
  if (labeled.length) {
    let ly = (tr.plotTop + 8) * scale;
    const lx = (tr.plotRight - 96) * scale;
    for (const s of labeled) {
      r.rect(lx, ly - 2 * scale, 18 * scale, 4 * scale, hexColor(s.color));
      r.text(lx + 24 * scale, ly - 3 * scale, s.label!, axis);
      ly += 16 * scale;
    }
  }

  const png = new PNG({ width: r.w, height: r.h });
  Buffer.from(r.data.buffer).copy(png.data);
  return PNG.sync.write(png);
}
