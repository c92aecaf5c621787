/**
 * Figure rendering.  The renderer performs no numerical analysis: every
 * annotated number (fitted slopes, residuals, ratios) is copied verbatim
 * from the JSON run summary that the solver wrote next to the CSV.
 */

import { writeFileSync } from "fs";

import { FigureSpec, RunSummary, Table, checkKind, defaultSummaryPath, loadSummary,
         num, parseCsv, requireColumns } from "./schema.js";
import { Svg, color, pad, xScale, yScale } from "./svg.js";

/** Annotation text for a fitted slope, exactly as tests reproduce it. */
export function slopeAnnotation(name: string, entry: { slope: number; residual: number }): string {
  return `${name}: slope=${entry.slope} residual=${entry.residual}`;
}

export function renderFigure(spec: FigureSpec): string {
  const table = parseCsv(spec.input);
  checkKind(table, spec.kind, spec.input);
  const summary = loadSummary(spec.summary ?? defaultSummaryPath(spec.input));
  let svg: string;
  switch (spec.kind) {
    case "trace":
      svg = renderTrace(table, spec);
      break;
    case "slope":
      svg = renderSlope(table, spec, summary);
      break;
    case "lifespan":
      svg = renderLifespan(table, spec, summary);
      break;
    case "ratio":
      svg = renderRatio(table, spec, summary);
      break;
  }
  writeFileSync(spec.output, svg);
  return svg;
}

const TRACE_SERIES = ["E1", "E1para", "Es"];

function renderTrace(table: Table, spec: FigureSpec): string {
  requireColumns(table, ["t", ...TRACE_SERIES], spec.input);
  const t = table.rows.map((row) => num(row, "t"));
  const svg = new Svg();
  const sx = xScale(pad([Math.min(...t), Math.max(...t)]));
  let lo = Infinity;
  let hi = -Infinity;
  for (const name of TRACE_SERIES) {
    for (const row of table.rows) {
      const v = num(row, name);
      if (Number.isFinite(v) && v > 0) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  const sy = yScale(pad([lo, hi], true), true);
  TRACE_SERIES.forEach((name, i) => {
    const pts: [number, number][] = [];
    table.rows.forEach((row, j) => {
      const v = num(row, name);
      if (Number.isFinite(v) && v > 0) {
        pts.push([sx(t[j]), sy(v)]);
      }
    });
    svg.polyline(pts, color(i));
    svg.text(sx(t[t.length - 1]) - 6, sy(num(table.rows[table.rows.length - 1], name)) - 6,
             name, { fill: color(i), anchor: "end" });
  });
  svg.axes(spec.xlabel ?? "t", spec.ylabel ?? "energy", "energy traces");
  return svg.render();
}

function renderSlope(table: Table, spec: FigureSpec, summary: RunSummary): string {
  requireColumns(table, ["model", "eps", "max_dE1", "max_dE1para"], spec.input);
  const eps = table.rows.map((row) => num(row, "eps"));
  const series = ["max_dE1", "max_dE1para"];
  const values = table.rows.flatMap((row) => series.map((name) => num(row, name)))
    .filter((v) => Number.isFinite(v) && v > 0);
  const svg = new Svg();
  const sx = xScale(pad([Math.min(...eps), Math.max(...eps)], true), true);
  const sy = yScale(pad([Math.min(...values), Math.max(...values)], true), true);
  const models = [...new Set(table.rows.map((row) => row.model))];
  models.forEach((model, mi) => {
    const rows = table.rows.filter((row) => row.model === model);
    series.forEach((name, si) => {
      const pts = rows
        .map((row): [number, number] => [sx(num(row, "eps")), sy(num(row, name))])
        .sort((a, b) => a[0] - b[0]);
      const c = color(mi * series.length + si);
      svg.polyline(pts, c, 1.2);
      pts.forEach(([x, y]) => svg.circle(x, y, c));
    });
  });
  let line = 0;
  for (const [name, entry] of Object.entries(summary.slopes ?? {})) {
    svg.text(110, 60 + 16 * line, slopeAnnotation(name, entry), { size: 12 });
    line += 1;
  }
  svg.axes(spec.xlabel ?? "data size", spec.ylabel ?? "max |dE/dt|",
           "drift scaling (recorded fits)");
  return svg.render();
}

function renderLifespan(table: Table, spec: FigureSpec, summary: RunSummary): string {
  requireColumns(table, ["eps", "product", "capped"], spec.input);
  const eps = table.rows.map((row) => num(row, "eps"));
  const products = table.rows.map((row) => num(row, "product"));
  const svg = new Svg();
  const sx = xScale(pad([Math.min(...eps), Math.max(...eps)], true), true);
  const sy = yScale(pad([0, Math.max(...products)]));
  table.rows.forEach((row, i) => {
    const capped = row.capped === "True" || row.capped === "true";
    const x = sx(eps[i]);
    svg.line(x, sy(0), x, sy(products[i]), color(0));
    svg.circle(x, sy(products[i]), capped ? "#999" : color(1), 5);
    if (capped) {
      svg.text(x, sy(products[i]) - 10, "cap", { anchor: "middle", size: 11, fill: "#666" });
    }
  });
  const spread = summary.metrics?.["product_spread"];
  if (spread !== undefined) {
    svg.text(110, 60, `product spread=${spread}`, { size: 12 });
  }
  svg.axes(spec.xlabel ?? "data size", spec.ylabel ?? "doubling time x size^2",
           "lifespan products (grey = capped lower bound)");
  return svg.render();
}

function renderRatio(table: Table, spec: FigureSpec, summary: RunSummary): string {
  requireColumns(table, ["delta", "ratio"], spec.input);
  const deltas = table.rows.map((row) => num(row, "delta"));
  const ratios = table.rows.map((row) => num(row, "ratio"));
  const svg = new Svg();
  const sx = xScale(pad([Math.min(...deltas), Math.max(...deltas)], true), true);
  const sy = yScale(pad([Math.min(1, ...ratios), Math.max(3, ...ratios)]));
  svg.line(sx.domain ? sx(sx.domain[0]) : 0, sy(3), sx(sx.domain[1]), sy(3), "#d62728",
           "6 3");
  table.rows.forEach((_, i) => svg.circle(sx(deltas[i]), sy(ratios[i]), color(0), 5));
  const ratio = summary.metrics?.["ratio"];
  if (ratio !== undefined) {
    svg.text(110, 60, `recorded ratio=${ratio}`, { size: 12 });
  }
  svg.axes(spec.xlabel ?? "initial separation", spec.ylabel ?? "sup ratio",
           "difference growth (dashed: admissible bound)");
  return svg.render();
}
