/** Builds the two figure kinds from parsed inputs. */

import { PathsFile } from "./csv";
import { Figure, Series } from "./figure";
import { QqFile } from "./qq";

const PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

export interface FanInput {
  file: PathsFile;
  level: number;
}

export function bridgeFanFigure(inputs: FanInput[], title?: string, width = 640, height = 480): Figure {
  if (inputs.length === 0) throw new Error("bridge-fan needs at least one paths file");
  const sorted = [...inputs].sort((a, b) => a.level - b.level);
  const series: Series[] = [];
  sorted.forEach((input, gi) => {
    const color = PALETTE[gi % PALETTE.length];
    input.file.paths.forEach((ys, pi) => {
      series.push({
        kind: "line",
        points: input.file.t.map((t, i) => [t, ys[i]] as [number, number]),
        color,
        width: 1,
        opacity: Math.min(1, Math.max(0.25, 3 / input.file.paths.length)),
        label: pi === 0 ? `L=${input.level}` : undefined,
      });
    });
  });
  const first = sorted[0].file;
  const tEnd = first.t[first.t.length - 1];
  return {
    width,
    height,
    title,
    xlabel: "t",
    ylabel: "y",
    series,
    markers: [
      { x: first.t[0], y: first.paths[0][0], color: "#000000" },
      { x: tEnd, y: first.paths[0][first.t.length - 1], color: "#000000" },
    ],
  };
}

export function qqFigure(qq: QqFile, title?: string, width = 520, height = 520): Figure {
  const lo = Math.min(...qq.qA, ...qq.qB);
  const hi = Math.max(...qq.qA, ...qq.qB);
  const identity: Series = {
    kind: "line",
    points: [
      [lo, lo],
      [hi, hi],
    ],
    color: "#888888",
    width: 1,
  };
  const scatter: Series = {
    kind: "scatter",
    points: qq.qA.map((qa, i) => [qa, qq.qB[i]] as [number, number]),
    color: PALETTE[0],
    radius: 2.5,
    opacity: 0.85,
  };
  return {
    width,
    height,
    title: title ?? qq.comparison,
    xlabel: `${qq.labelA} quantiles`,
    ylabel: `${qq.labelB} quantiles`,
    series: [identity, scatter],
  };
}
