/**
 * Report-file schemas: versioned CSV tables plus the JSON run summary.
 *
 * Every CSV written by the solver starts with
 *   # kgnf-csv v1 schema=<name> config=<hash>
 * and the figure kind must match that schema; the renderer refuses
 * anything else so a stale or mislabeled file cannot be plotted silently.
 */

import { readFileSync } from "fs";

export type FigureKind = "trace" | "slope" | "lifespan" | "ratio";

export interface FigureSpec {
  input: string;
  kind: FigureKind;
  output: string;
  xlabel?: string;
  ylabel?: string;
  /** JSON run summary; defaults to the input path with a .json extension */
  summary?: string;
}

export interface Table {
  schema: string;
  configHash: string;
  columns: string[];
  rows: Record<string, string>[];
}

export const KIND_TO_SCHEMA: Record<FigureKind, string> = {
  trace: "trajectory",
  slope: "drift_sweep",
  lifespan: "lifespan",
  ratio: "lipschitz",
};

const HEADER = /^# kgnf-csv v1 schema=(\S+) config=(\S+)\s*$/;

export function parseCsv(path: string): Table {
  const text = readFileSync(path, "utf-8");
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty report file`);
  }
  const match = lines[0].match(HEADER);
  if (!match) {
    throw new Error(`${path}: missing kgnf-csv version header`);
  }
  if (lines.length < 2) {
    throw new Error(`${path}: header only, no column row`);
  }
  const columns = lines[1].split(",");
  const rows = lines.slice(2).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    columns.forEach((name, i) => {
      row[name] = cells[i] ?? "";
    });
    return row;
  });
  return { schema: match[1], configHash: match[2], columns, rows };
}

export function requireColumns(table: Table, names: string[], path: string): void {
  const missing = names.filter((name) => !table.columns.includes(name));
  if (missing.length > 0) {
    throw new Error(`${path}: missing columns: ${missing.join(", ")}`);
  }
  if (table.rows.length === 0) {
    throw new Error(`${path}: no data rows`);
  }
}

export function checkKind(table: Table, kind: FigureKind, path: string): void {
  const expected = KIND_TO_SCHEMA[kind];
  if (table.schema !== expected) {
    throw new Error(
      `${path}: schema '${table.schema}' does not match figure kind ` +
        `'${kind}' (expects '${expected}')`,
    );
  }
}

export interface SlopeEntry {
  slope: number;
  residual: number;
}

export interface RunSummary {
  config_hash?: string;
  slopes?: Record<string, SlopeEntry>;
  metrics?: Record<string, unknown>;
  gates?: Record<string, boolean>;
}

export function loadSummary(path: string): RunSummary {
  return JSON.parse(readFileSync(path, "utf-8")) as RunSummary;
}

export function defaultSummaryPath(input: string): string {
  return input.replace(/\.csv$/, "") + ".json";
}

export function num(row: Record<string, string>, key: string): number {
  return Number(row[key]);
}
