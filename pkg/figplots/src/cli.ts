#!/usr/bin/env node
/** figplots <kind> <input.csv> <output.svg> */

import { render } from "./render.js";
import { KINDS, type FigureKind } from "./spec.js";

function main(argv: string[]): number {
  const [kind, csvPath, outPath] = argv;
  if (!kind || !csvPath || !outPath) {
    console.error(`usage: figplots <${KINDS.join("|")}> <input.csv> <output.svg>`);
    return 2;
  }
  if (!KINDS.includes(kind as FigureKind)) {
    console.error(`figplots: unknown kind '${kind}'; choose from ${KINDS.join(", ")}`);
    return 2;
  }
  try {
    render({ kind: kind as FigureKind, csvPath, outPath });
  } catch (err) {
    console.error(`figplots: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  console.log(outPath);
  return 0;
}

process.exit(main(process.argv.slice(2)));
