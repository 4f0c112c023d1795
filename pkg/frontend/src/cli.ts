#!/usr/bin/env node
/** plots <spec-file> | plots --csv results/fig1.csv [--x fft_count]
 *  [--out fig.svg] [--slopes 2,4] [--title ...] */

import * as fs from "node:fs";
import * as path from "node:path";

import { buildSpec, parseSpecFile, plotEfficiency } from "./plot.js";

function usage(): string {
  return (
    "usage: plots <spec-file>\n" +
    "       plots --csv a.csv[,b.csv] [--x n_steps|fft_count] [--out fig.svg]\n" +
    "             [--slopes 2,4] [--title text]"
  );
}

export function main(argv: string[]): number {
  try {
    if (argv.length === 0) {
      process.stderr.write(usage() + "\n");
      return 2;
    }
    if (!argv[0].startsWith("--")) {
      const specPath = argv[0];
      const spec = parseSpecFile(fs.readFileSync(specPath, "utf8"), path.dirname(specPath));
      plotEfficiency(spec);
      return 0;
    }
    const raw: Record<string, string> = {};
    for (let i = 0; i < argv.length; i += 2) {
      const key = argv[i];
      const val = argv[i + 1];
      if (!key.startsWith("--") || val === undefined) {
        throw new Error(`malformed flag pair near '${key}'`);
      }
      raw[key.slice(2)] = val;
    }
    const spec = buildSpec(raw, process.cwd());
    plotEfficiency(spec);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
