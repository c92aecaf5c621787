#!/usr/bin/env node
/**
 * plots render --spec fig.json
 *
 * The spec file holds {input, kind, output, xlabel?, ylabel?, summary?};
 * kind is one of trace | slope | lifespan | ratio and must match the
 * schema recorded in the input's header line.
 */

import { readFileSync } from "fs";

import { FigureSpec } from "./schema.js";
import { renderFigure } from "./render.js";

function usage(): never {
  console.error("usage: plots render --spec fig.json");
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    usage();
  }
  const flag = argv.indexOf("--spec");
  if (flag === -1 || !argv[flag + 1]) {
    usage();
  }
  const spec = JSON.parse(readFileSync(argv[flag + 1], "utf-8")) as FigureSpec;
  for (const key of ["input", "kind", "output"] as const) {
    if (!spec[key]) {
      console.error(`figure spec missing required key '${key}'`);
      return 2;
    }
  }
  try {
    renderFigure(spec);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  console.log(`wrote ${spec.output}`);
  return 0;
}

process.exitCode = main(process.argv.slice(2));
