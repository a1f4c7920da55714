#!/usr/bin/env node
/** render --csv PATH --preset NAME --out DIR
 *  Writes <out>/<preset>.svg from a harness aggregates.csv. */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { MissingColumnsError, renderFigure } from "./render.js";
import { FIGURE_SPECS } from "./spec.js";

const USAGE =
  "usage: risac-render render --csv PATH --preset NAME --out DIR\n" +
  `presets: ${Object.keys(FIGURE_SPECS).join(", ")}`;

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        csv: { type: "string" },
        preset: { type: "string" },
        out: { type: "string" },
      },
    });
  } catch (err) {
    console.error(String(err));
    console.error(USAGE);
    return 2;
  }
  const [command] = parsed.positionals;
  const { csv, preset, out } = parsed.values;
  if (command !== "render" || !csv || !preset || !out) {
    console.error(USAGE);
    return 2;
  }
  try {
    const text = readFileSync(csv, "utf8");
    const svg = renderFigure(text, preset);
    mkdirSync(out, { recursive: true });
    const path = join(out, `${preset}.svg`);
    writeFileSync(path, svg);
    console.log(`wrote ${path}`);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnsError) {
      console.error(err.message);
    } else {
      console.error(`render failed: ${err instanceof Error ? err.message : err}`);
    }
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
