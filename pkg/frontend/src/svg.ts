/**
 * Minimal deterministic SVG assembly.
 *
 * Every coordinate is formatted with a fixed decimal count so that a
 * given figure spec always produces the same bytes.
 */

export function fmt(x: number, decimals = 2): string {
  if (!Number.isFinite(x)) {
    throw new Error(`non-finite coordinate ${x}`);
  }
  const s = x.toFixed(decimals);
  return s === "-0." + "0".repeat(decimals) ? s.slice(1) : s;
}

/** Linear map from [d0, d1] to [r0, r1]. */
export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number
): (x: number) => number {
  const span = d1 - d0;
  return (x: number) => r0 + ((x - d0) / (span === 0 ? 1 : span)) * (r1 - r0);
}

/** Round tick positions covering [lo, hi] with roughly n steps. */
export function ticks(lo: number, hi: number, n: number): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / Math.max(1, n);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return out;
}

function channel(stops: number[][], t: number, k: number): number {
  const pos = t * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(pos));
  const f = pos - i;
  return Math.round(255 * (stops[i][k] * (1 - f) + stops[i + 1][k] * f));
}

const INFERNO_STOPS: number[][] = [
  [0.001, 0.0, 0.014],
  [0.186, 0.04, 0.367],
  [0.445, 0.122, 0.507],
  [0.69, 0.205, 0.389],
  [0.891, 0.349, 0.2],
  [0.976, 0.59, 0.116],
  [0.965, 0.843, 0.273],
  [0.988, 0.998, 0.645],
];

/** Dark-to-bright heat colormap; t clamped to [0, 1]. */
export function heatColor(t: number): string {
  const u = Math.min(1, Math.max(0, t));
  const r = channel(INFERNO_STOPS, u, 0);
  const g = channel(INFERNO_STOPS, u, 1);
  const b = channel(INFERNO_STOPS, u, 2);
  return `rgb(${r},${g},${b})`;
}

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
        `height="${height}" viewBox="0 0 ${width} ${height}">`,
      `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>`
    );
  }

  raw(markup: string): void {
    this.parts.push(markup);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
        `height="${fmt(h)}" fill="${fill}"/>`
    );
  }

  line(
    x1: number,
    y1: number,
    x2: number,
    y2: number,
    stroke: string,
    width = 1,
    dash = ""
  ): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
        `y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    if (points.length === 0) return;
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${width}"${d}/>`
    );
  }

  text(
    x: number,
    y: number,
    value: string,
    anchor: "start" | "middle" | "end" = "middle",
    size = 11
  ): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica,sans-serif" ` +
        `font-size="${size}" text-anchor="${anchor}">${escapeXml(value)}</text>`
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Draw axes with ticks and labels around a plot frame. */
export function drawAxes(
  doc: SvgDoc,
  frame: Frame,
  xLo: number,
  xHi: number,
  yLo: number,
  yHi: number,
  xLabel: string,
  yLabel: string,
  tickFormat: (v: number) => string = (v) => trimNumber(v)
): void {
  const sx = linearScale(xLo, xHi, frame.left, frame.width - frame.right);
  const sy = linearScale(yLo, yHi, frame.height - frame.bottom, frame.top);
  const x0 = frame.left;
  const x1 = frame.width - frame.right;
  const y0 = frame.height - frame.bottom;
  const y1 = frame.top;
  doc.line(x0, y0, x1, y0, "black");
  doc.line(x0, y0, x0, y1, "black");
  for (const t of ticks(xLo, xHi, 6)) {
    const px = sx(t);
    doc.line(px, y0, px, y0 + 4, "black");
    doc.text(px, y0 + 16, tickFormat(t));
  }
  for (const t of ticks(yLo, yHi, 6)) {
    const py = sy(t);
    doc.line(x0 - 4, py, x0, py, "black");
    doc.text(x0 - 7, py + 3.5, tickFormat(t), "end");
  }
  doc.text((x0 + x1) / 2, frame.height - 6, xLabel);
  doc.raw(
    `<text x="14" y="${fmt((y0 + y1) / 2)}" font-family="Helvetica,sans-serif" ` +
      `font-size="11" text-anchor="middle" transform="rotate(-90 14 ` +
      `${fmt((y0 + y1) / 2)})">${escapeXml(yLabel)}</text>`
  );
}

/** Compact human-readable number for tick labels. */
export function trimNumber(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(6)));
}
