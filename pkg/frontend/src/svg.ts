/** Deterministic SVG renderer: fixed canvas, fixed fonts, no timestamps.
 *  Identical figures produce byte-identical markup. */

import { Figure } from "./figure";

const WIDTH = 640;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 30, bottom: 56, left: 78 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 10000 || a < 0.001) return v.toExponential(2);
  return String(Number(v.toPrecision(5)));
}

interface Mapper {
  (v: number): number;
}

function makeScale(
  lo: number,
  hi: number,
  rangeLo: number,
  rangeHi: number,
  log: boolean
): Mapper {
  const t = (v: number) => (log ? Math.log10(v) : v);
  let a = t(lo);
  let b = t(hi);
  if (a === b) {
    a -= 0.5;
    b += 0.5;
  }
  return (v: number) => rangeLo + ((t(v) - a) / (b - a)) * (rangeHi - rangeLo);
}

function ticks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    const dLo = Math.floor(Math.log10(lo));
    const dHi = Math.ceil(Math.log10(hi));
    for (let d = dLo; d <= dHi; d++) {
      const v = Math.pow(10, d);
      if (v >= lo * 0.999 && v <= hi * 1.001) out.push(v);
    }
    if (!out.includes(lo)) out.unshift(lo);
    if (!out.includes(hi)) out.push(hi);
    return out;
  }
  if (lo === hi) return [lo];
  const n = 5;
  const out: number[] = [];
  for (let i = 0; i <= n; i++) out.push(lo + ((hi - lo) * i) / n);
  return out;
}

export function renderSvg(fig: Figure): string {
  const xs = fig.series.flatMap((s) => s.points.map((p) => p.x));
  const ysAll = fig.series.flatMap((s) =>
    s.points.flatMap((p) => [p.y - (p.err ?? 0), p.y + (p.err ?? 0)])
  );
  for (const line of fig.refLines) ysAll.push(line.y);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  let yLo = Math.min(...ysAll);
  let yHi = Math.max(...ysAll);
  if (yLo === yHi) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const pad = 0.06 * (yHi - yLo);
  yLo -= pad;
  yHi += pad;

  const plotL = MARGIN.left;
  const plotR = WIDTH - MARGIN.right;
  const plotT = MARGIN.top;
  const plotB = HEIGHT - MARGIN.bottom;
  const xRange: [number, number] = fig.xDescending ? [plotR, plotL] : [plotL, plotR];
  const sx = makeScale(xLo, xHi, xRange[0], xRange[1], fig.xScale === "log");
  const sy = makeScale(yLo, yHi, plotB, plotT, false);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" data-kind="${fig.kind}" ` +
      `data-xscale="${fig.xScale}" data-xdescending="${fig.xDescending}" ` +
      `font-family="Helvetica, Arial, sans-serif" font-size="12">`
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<rect x="${plotL}" y="${plotT}" width="${plotR - plotL}" height="${plotB - plotT}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`
  );

  for (const tv of ticks(xLo, xHi, fig.xScale === "log")) {
    const px = sx(tv);
    parts.push(
      `<line x1="${fmt(px)}" y1="${plotB}" x2="${fmt(px)}" y2="${plotB + 5}" stroke="#333"/>`
    );
    parts.push(
      `<text x="${fmt(px)}" y="${plotB + 20}" text-anchor="middle">${fmt(tv)}</text>`
    );
  }
  for (const tv of ticks(yLo, yHi, false)) {
    const py = sy(tv);
    parts.push(
      `<line x1="${plotL - 5}" y1="${fmt(py)}" x2="${plotL}" y2="${fmt(py)}" stroke="#333"/>`
    );
    parts.push(
      `<text x="${plotL - 9}" y="${fmt(py + 4)}" text-anchor="end">${fmt(tv)}</text>`
    );
  }
  parts.push(
    `<text x="${(plotL + plotR) / 2}" y="${HEIGHT - 14}" text-anchor="middle">${fig.xLabel}</text>`
  );
  parts.push(
    `<text x="20" y="${(plotT + plotB) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 20 ${(plotT + plotB) / 2})">${fig.yLabel}</text>`
  );
  parts.push(
    `<text x="${(plotL + plotR) / 2}" y="24" text-anchor="middle" font-size="14">${fig.kind}</text>`
  );

  for (const line of fig.refLines) {
    const py = sy(line.y);
    parts.push(
      `<line class="ref-line" x1="${plotL}" y1="${fmt(py)}" x2="${plotR}" y2="${fmt(py)}" ` +
        `stroke="#2ca02c" stroke-width="2"/>`
    );
    parts.push(
      `<text x="${plotR - 4}" y="${fmt(py - 6)}" text-anchor="end" fill="#2ca02c">${line.label}</text>`
    );
  }

  fig.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    for (const p of s.points) {
      if (p.err !== null && p.err > 0) {
        const px = sx(p.x);
        const y1 = sy(p.y - p.err);
        const y2 = sy(p.y + p.err);
        parts.push(
          `<line class="error-bar" x1="${fmt(px)}" y1="${fmt(y1)}" x2="${fmt(px)}" ` +
            `y2="${fmt(y2)}" stroke="${color}" stroke-width="1"/>`
        );
        for (const yy of [y1, y2]) {
          parts.push(
            `<line class="error-cap" x1="${fmt(px - 3)}" y1="${fmt(yy)}" ` +
              `x2="${fmt(px + 3)}" y2="${fmt(yy)}" stroke="${color}" stroke-width="1"/>`
          );
        }
      }
    }
    const path = s.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
    parts.push(
      `<polyline class="series-line" data-series="${s.name}" points="${path}" ` +
        `fill="none" stroke="${color}" stroke-width="2"/>`
    );
    for (const p of s.points) {
      parts.push(
        `<circle class="series-point" data-series="${s.name}" cx="${fmt(sx(p.x))}" ` +
          `cy="${fmt(sy(p.y))}" r="3.5" fill="${color}"/>`
      );
    }
    const lx = plotL + 10;
    const ly = plotT + 16 + 18 * i;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="2"/>`
    );
    parts.push(`<text x="${lx + 28}" y="${ly}">${s.name}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}
