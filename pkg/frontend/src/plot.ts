/** Efficiency-curve generation from convergence CSVs. */

import * as fs from "node:fs";
import * as path from "node:path";

import { byMethod, parseCsv } from "./records.js";
import { fittedSlope } from "./slope.js";
import { renderFigure, Series } from "./svg.js";

export type XAxis = "n_steps" | "fft_count";

export interface PlotSpec {
  csvPaths: string[];
  x: XAxis;
  out: string;
  title: string;
  slopes: number[];
}

export interface PlotOutcome {
  outPath: string;
  seriesCount: number;
  dropped: number;
  fittedSlopes: Map<string, number>;
}

export function plotEfficiency(
  spec: PlotSpec,
  log: (msg: string) => void = console.log,
  warn: (msg: string) => void = console.error,
): PlotOutcome {
  const records = [];
  let dropped = 0;
  for (const p of spec.csvPaths) {
    const parsed = parseCsv(fs.readFileSync(p, "utf8"), warn);
    records.push(...parsed.records);
    dropped += parsed.dropped;
  }
  const groups = byMethod(records);
  if (groups.size === 0) {
    throw new Error("no plottable rows left after dropping failed runs");
  }

  const series: Series[] = [];
  const slopes = new Map<string, number>();
  for (const [method, rows] of groups) {
    series.push({
      name: method,
      xs: rows.map((r) => (spec.x === "n_steps" ? r.n_steps : r.fft_count)),
      ys: rows.map((r) => r.l2_error),
    });
    const s = fittedSlope(rows);
    slopes.set(method, s);
    if (Number.isFinite(s)) {
      log(`[slope] ${method} fitted slope ${s.toFixed(2)} (three finest step counts)`);
    }
  }

  const svg = renderFigure(series, {
    title: spec.title,
    xLabel: spec.x === "n_steps" ? "time steps" : "1D transforms",
    slopeGuides: spec.slopes,
  });
  fs.mkdirSync(path.dirname(path.resolve(spec.out)), { recursive: true });
  fs.writeFileSync(spec.out, svg);
  log(`[image] ${spec.out} (${series.length} curves, ${dropped} dropped rows)`);
  return { outPath: spec.out, seriesCount: series.length, dropped, fittedSlopes: slopes };
}

/** Parse a flat key = value spec file (same style as the benchmark configs). */
export function parseSpecFile(text: string, baseDir: string): PlotSpec {
  const values = new Map<string, string>();
  text.split(/\r?\n/).forEach((raw, i) => {
    const line = raw.split("#", 1)[0].trim();
    if (!line) {
      return;
    }
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new Error(`line ${i + 1}: expected 'key = value', got '${raw.trim()}'`);
    }
    values.set(line.slice(0, eq).trim().toLowerCase(), line.slice(eq + 1).trim());
  });
  return buildSpec(Object.fromEntries(values), baseDir);
}

export function buildSpec(
  raw: { csv?: string; x?: string; out?: string; title?: string; slopes?: string },
  baseDir: string,
): PlotSpec {
  if (!raw.csv) {
    throw new Error("missing required key 'csv'");
  }
  const csvPaths = raw.csv
    .split(",")
    .map((s) => s.trim())
    .filter(Boolean)
    .map((p) => path.resolve(baseDir, p));
  const x = (raw.x ?? "fft_count") as XAxis;
  if (x !== "n_steps" && x !== "fft_count") {
    throw new Error(`x axis must be n_steps or fft_count, got '${raw.x}'`);
  }
  const slopes = (raw.slopes ?? "")
    .split(",")
    .map((s) => s.trim())
    .filter(Boolean)
    .map((s) => {
      const v = Number(s);
      if (!Number.isInteger(v) || v < 1) {
        throw new Error(`slope guides must be positive integers, got '${s}'`);
      }
      return v;
    });
  return {
    csvPaths,
    x,
    out: path.resolve(baseDir, raw.out ?? "efficiency.svg"),
    title: raw.title ?? "efficiency",
    slopes,
  };
}
