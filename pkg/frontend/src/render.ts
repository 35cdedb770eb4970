/**
 * Figure renderers for QLS1 result containers.
 *
 * Kinds:
 *   joint        joint photon-photoelectron energy heatmap with the
 *                2 Up(n) and 10 Up(n) cutoff-line overlays
 *   pes-compare  total photoelectron spectra overlaid (first input
 *                solid black, second red dashed); with perFock set,
 *                small-multiple panels of single Fock columns instead
 *   photon-dist  photon-number distributions, even-n upper panel and
 *                odd-n lower panel, optional second-input overlay
 *
 * All output is SVG text assembled with fixed numeric formatting, so a
 * given spec and input set always renders to identical bytes.
 */

import {
  Container,
  ContainerFormatError,
  NdArray,
  loadContainer,
  requireArray,
} from "./container";
import {
  Frame,
  SvgDoc,
  drawAxes,
  fmt,
  heatColor,
  linearScale,
  trimNumber,
} from "./svg";

export type FigureKind = "joint" | "pes-compare" | "photon-dist";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  /** Energy-axis range; null means derive from the data. */
  eMin: number | null;
  eMax: number | null;
  logScale: boolean;
  /** Fock columns for the per-Fock comparison panels (pes-compare). */
  perFock: number[] | null;
  labels: string[];
}

export function defaultSpec(kind: FigureKind, inputs: string[], output: string): FigureSpec {
  return {
    kind,
    inputs,
    output,
    eMin: null,
    eMax: null,
    logScale: true,
    perFock: null,
    labels: [],
  };
}

function asMatrix(arr: NdArray, name: string): { rows: number; cols: number; at: (i: number, j: number) => number } {
  if (arr.shape.length !== 2 || arr.dtype !== "f64") {
    throw new ContainerFormatError(
      `array '${name}' must be a real 2-d matrix, got ${arr.dtype} [${arr.shape.join(", ")}]`
    );
  }
  const [rows, cols] = arr.shape;
  return { rows, cols, at: (i, j) => arr.data[i * cols + j] };
}

function asVector(arr: NdArray, name: string): Float64Array {
  if (arr.shape.length !== 1 || arr.dtype !== "f64") {
    throw new ContainerFormatError(
      `array '${name}' must be a real 1-d vector, got ${arr.dtype} [${arr.shape.join(", ")}]`
    );
  }
  return arr.data;
}

function energyRange(spec: FigureSpec, energies: Float64Array): [number, number] {
  const lo = spec.eMin ?? energies[0];
  const hi = spec.eMax ?? energies[energies.length - 1];
  if (!(hi > lo)) {
    throw new ContainerFormatError(`empty energy range [${lo}, ${hi}]`);
  }
  return [lo, hi];
}

const FRAME: Frame = { width: 640, height: 460, left: 64, right: 96, top: 28, bottom: 44 };
const CURVE_STYLES: Array<{ stroke: string; dash: string }> = [
  { stroke: "black", dash: "" },
  { stroke: "#cc0000", dash: "6,4" },
  { stroke: "#0044cc", dash: "2,3" },
];

function logFloor(values: number[], decades: number): number {
  let peak = 0;
  for (const v of values) peak = Math.max(peak, v);
  return peak > 0 ? peak / Math.pow(10, decades) : 1e-30;
}

function renderJoint(spec: FigureSpec, c: Container): string {
  const label = spec.inputs[0];
  const joint = asMatrix(requireArray(c, "joint", label), "joint");
  const energies = asVector(requireArray(c, "energies", label), "energies");
  const fockNs = asVector(requireArray(c, "fock_ns", label), "fock_ns");
  if (joint.rows !== energies.length || joint.cols !== fockNs.length) {
    throw new ContainerFormatError(
      `joint shape [${joint.rows}, ${joint.cols}] does not match axes ` +
        `(${energies.length} energies, ${fockNs.length} fock_ns)`
    );
  }
  const [eLo, eHi] = energyRange(spec, energies);
  const nLo = fockNs[0];
  const nHi = fockNs[fockNs.length - 1];

  const doc = new SvgDoc(FRAME.width, FRAME.height);
  const sx = linearScale(nLo - 0.5, nHi + 0.5, FRAME.left, FRAME.width - FRAME.right);
  const sy = linearScale(eLo, eHi, FRAME.height - FRAME.bottom, FRAME.top);

  const vals: number[] = [];
  for (let i = 0; i < joint.rows; i++) {
    for (let j = 0; j < joint.cols; j++) vals.push(joint.at(i, j));
  }
  const decades = 6;
  const floor = logFloor(vals, decades);
  const top = Math.max(...vals, floor * 10);
  const toUnit = (v: number) =>
    v <= floor ? 0 : Math.log10(v / floor) / Math.log10(top / floor);

  const de = energies.length > 1 ? energies[1] - energies[0] : eHi - eLo;
  for (let j = 0; j < joint.cols; j++) {
    const x = sx(fockNs[j] - 0.5);
    const w = sx(fockNs[j] + 0.5) - x;
    for (let i = 0; i < joint.rows; i++) {
      const e = energies[i];
      if (e + de / 2 < eLo || e - de / 2 > eHi) continue;
      const y = sy(Math.min(eHi, e + de / 2));
      const h = sy(Math.max(eLo, e - de / 2)) - y;
      doc.rect(x, y, w, h, heatColor(toUnit(joint.at(i, j))));
    }
  }

  for (const [name, style] of [
    ["cutoff_2up", { stroke: "white", dash: "" }],
    ["cutoff_10up", { stroke: "white", dash: "5,4" }],
  ] as Array<[string, { stroke: string; dash: string }]>) {
    const arr = c.arrays.get(name);
    if (arr === undefined) continue;
    const line = asVector(arr, name);
    const pts: Array<[number, number]> = [];
    for (let j = 0; j < Math.min(line.length, fockNs.length); j++) {
      const e = line[j];
      if (e < eLo || e > eHi) continue;
      pts.push([sx(fockNs[j]), sy(e)]);
    }
    doc.polyline(pts, style.stroke, 1.5, style.dash);
  }

  drawAxes(doc, FRAME, nLo - 0.5, nHi + 0.5, eLo, eHi,
    "photon number n", "electron energy (a.u.)");

  // color bar
  const barX = FRAME.width - FRAME.right + 24;
  const barTop = FRAME.top;
  const barH = FRAME.height - FRAME.top - FRAME.bottom;
  const steps = 64;
  for (let k = 0; k < steps; k++) {
    const y = barTop + (barH * (steps - 1 - k)) / steps;
    doc.rect(barX, y, 14, barH / steps + 0.5, heatColor((k + 0.5) / steps));
  }
  doc.text(barX + 7, barTop - 8, "1");
  doc.text(barX + 7, barTop + barH + 14, `1e-${decades}`);
  return doc.render();
}

function renderPesCompare(spec: FigureSpec, containers: Container[]): string {
  const curves = containers.map((c, k) => ({
    pes: asVector(requireArray(c, "pes", spec.inputs[k]), "pes"),
    energies: asVector(requireArray(c, "energies", spec.inputs[k]), "energies"),
    label: spec.labels[k] ?? baseName(spec.inputs[k]),
  }));
  const [eLo, eHi] = energyRange(spec, curves[0].energies);
  const doc = new SvgDoc(FRAME.width, FRAME.height);
  drawCurvePanel(doc, FRAME, curves, eLo, eHi, spec.logScale,
    "electron energy (a.u.)", "ionization probability density");
  return doc.render();
}

function renderPesFock(spec: FigureSpec, containers: Container[]): string {
  const ns = spec.perFock as number[];
  const data = containers.map((c, k) => {
    const joint = asMatrix(requireArray(c, "joint", spec.inputs[k]), "joint");
    const energies = asVector(requireArray(c, "energies", spec.inputs[k]), "energies");
    const fockNs = asVector(requireArray(c, "fock_ns", spec.inputs[k]), "fock_ns");
    return { joint, energies, fockNs, label: spec.labels[k] ?? baseName(spec.inputs[k]) };
  });
  const [eLo, eHi] = energyRange(spec, data[0].energies);

  const panelH = 150;
  const width = 640;
  const height = ns.length * panelH + 40;
  const doc = new SvgDoc(width, height);
  ns.forEach((n, row) => {
    const frame: Frame = {
      width,
      height,
      left: 64,
      right: 36,
      top: row * panelH + 20,
      bottom: height - (row + 1) * panelH - 6,
    };
    const curves = data.map((d) => {
      const j = indexOfValue(d.fockNs, n, d.label);
      const pes = new Float64Array(d.joint.rows);
      for (let i = 0; i < d.joint.rows; i++) pes[i] = d.joint.at(i, j);
      return { pes, energies: d.energies, label: d.label };
    });
    drawCurvePanel(doc, frame, curves, eLo, eHi, spec.logScale,
      row === ns.length - 1 ? "electron energy (a.u.)" : "",
      `n = ${n}`);
  });
  return doc.render();
}

function renderPhotonDist(spec: FigureSpec, containers: Container[]): string {
  const data = containers.map((c, k) => ({
    dist: asVector(requireArray(c, "photon_dist", spec.inputs[k]), "photon_dist"),
    fockNs: asVector(requireArray(c, "fock_ns", spec.inputs[k]), "fock_ns"),
    label: spec.labels[k] ?? baseName(spec.inputs[k]),
  }));
  const width = 640;
  const panelH = 190;
  const height = 2 * panelH + 40;
  const doc = new SvgDoc(width, height);
  (["even", "odd"] as const).forEach((par, row) => {
    const frame: Frame = {
      width,
      height,
      left: 64,
      right: 36,
      top: row * panelH + 20,
      bottom: height - (row + 1) * panelH - 6,
    };
    const want = par === "even" ? 0 : 1;
    const curves = data.map((d) => {
      const ns: number[] = [];
      const ps: number[] = [];
      for (let j = 0; j < d.fockNs.length; j++) {
        if (((d.fockNs[j] % 2) + 2) % 2 === want) {
          ns.push(d.fockNs[j]);
          ps.push(d.dist[j]);
        }
      }
      return { pes: Float64Array.from(ps), energies: Float64Array.from(ns), label: d.label };
    });
    const nLo = curves[0].energies[0];
    const nHi = curves[0].energies[curves[0].energies.length - 1];
    drawCurvePanel(doc, frame, curves, nLo, nHi, spec.logScale,
      row === 1 ? "photon number n" : "",
      `P(n), ${par} n`);
  });
  return doc.render();
}

interface Curve {
  pes: Float64Array;
  energies: Float64Array;
  label: string;
}

function drawCurvePanel(
  doc: SvgDoc,
  frame: Frame,
  curves: Curve[],
  xLo: number,
  xHi: number,
  logScale: boolean,
  xLabel: string,
  yLabel: string
): void {
  const all: number[] = [];
  for (const c of curves) for (const v of c.pes) all.push(v);
  let yLo: number;
  let yHi: number;
  let toY: (v: number) => number;
  if (logScale) {
    const floor = logFloor(all, 8);
    const top = Math.max(...all, floor * 10);
    yLo = Math.log10(floor);
    yHi = Math.log10(top);
    toY = (v) => Math.log10(Math.max(v, floor));
  } else {
    yLo = 0;
    yHi = Math.max(...all, 1e-30);
    toY = (v) => v;
  }
  const sx = linearScale(xLo, xHi, frame.left, frame.width - frame.right);
  const sy = linearScale(yLo, yHi, frame.height - frame.bottom, frame.top);
  drawAxes(doc, frame, xLo, xHi, yLo, yHi, xLabel, yLabel,
    logScale ? (v) => `1e${trimNumber(v)}` : trimNumber);
  curves.forEach((curve, k) => {
    const style = CURVE_STYLES[k % CURVE_STYLES.length];
    const pts: Array<[number, number]> = [];
    for (let i = 0; i < curve.energies.length; i++) {
      const x = curve.energies[i];
      if (x < xLo || x > xHi) continue;
      pts.push([sx(x), sy(toY(curve.pes[i]))]);
    }
    doc.polyline(pts, style.stroke, 1.5, style.dash);
    const ly = frame.top + 14 + 14 * k;
    doc.line(frame.width - frame.right - 150, ly - 3.5,
      frame.width - frame.right - 120, ly - 3.5, style.stroke, 1.5, style.dash);
    doc.text(frame.width - frame.right - 114, ly, curve.label, "start", 10);
  });
}

function indexOfValue(ns: Float64Array, n: number, label: string): number {
  for (let j = 0; j < ns.length; j++) {
    if (ns[j] === n) return j;
  }
  throw new ContainerFormatError(`Fock column n=${n} not present in '${label}'`);
}

function baseName(path: string): string {
  const parts = path.split(/[\\/]/);
  return parts[parts.length - 1].replace(/\.qls1$/, "");
}

/** Render a figure spec to SVG text. */
export function renderFigure(spec: FigureSpec): string {
  if (spec.inputs.length === 0) {
    throw new ContainerFormatError("at least one --input container is required");
  }
  const containers = spec.inputs.map((p) => loadContainer(p));
  switch (spec.kind) {
    case "joint":
      return renderJoint(spec, containers[0]);
    case "pes-compare":
      if (spec.perFock !== null && spec.perFock.length > 0) {
        return renderPesFock(spec, containers);
      }
      return renderPesCompare(spec, containers);
    case "photon-dist":
      return renderPhotonDist(spec, containers);
    default:
      throw new ContainerFormatError(`unknown figure kind '${spec.kind}'`);
  }
}

export { fmt };
