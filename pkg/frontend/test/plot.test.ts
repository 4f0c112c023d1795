import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { CSV_HEADER } from "../src/records.js";
import { buildSpec, parseSpecFile, plotEfficiency } from "../src/plot.js";

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "plots-"));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function writeFig1Like(): string {
  const rows: string[] = [CSV_HEADER];
  for (const [method, p, c] of [
    ["ROT2", 4, 3e-3],
    ["STD2", 2, 2e-1],
  ] as const) {
    for (const n of [16, 24, 32, 48, 64]) {
      const h = 3.0 / n;
      rows.push(`${method},${n},${h},${c * Math.pow(h, p)},1.0,${6 * n},12.5,`);
    }
  }
  const p = path.join(dir, "fig1.csv");
  fs.writeFileSync(p, rows.join("\n") + "\n");
  return p;
}

const silent = () => {};

describe("plotEfficiency", () => {
  it("renders two curves and two slope guides for a fig1-style CSV", () => {
    const csv = writeFig1Like();
    const out = path.join(dir, "fig1.svg");
    const outcome = plotEfficiency(
      { csvPaths: [csv], x: "fft_count", out, title: "fig1", slopes: [2, 4] },
      silent,
      silent,
    );
    expect(outcome.seriesCount).toBe(2);
    const svg = fs.readFileSync(out, "utf8");
    expect(svg.match(/class="series-line"/g)).toHaveLength(2);
    expect(svg.match(/class="slope-guide"/g)).toHaveLength(2);
    expect(svg).toContain("ROT2");
    expect(svg).toContain("STD2");
  });

  it("prints fitted slopes matching the synthetic law to 0.01", () => {
    const csv = writeFig1Like();
    const logs: string[] = [];
    const outcome = plotEfficiency(
      { csvPaths: [csv], x: "n_steps", out: path.join(dir, "o.svg"), title: "t", slopes: [] },
      (m) => logs.push(m),
      silent,
    );
    expect(Math.abs(outcome.fittedSlopes.get("ROT2")! - 4.0)).toBeLessThan(0.01);
    expect(Math.abs(outcome.fittedSlopes.get("STD2")! - 2.0)).toBeLessThan(0.01);
    const printed = logs.find((l) => l.includes("ROT2"))!;
    expect(printed).toContain("4.00");
  });

  it("draws a lone point without a line and exits cleanly", () => {
    const csv = path.join(dir, "one.csv");
    fs.writeFileSync(csv, [CSV_HEADER, "M,10,0.1,0.01,1.0,60,1.0,"].join("\n"));
    const out = path.join(dir, "one.svg");
    const outcome = plotEfficiency(
      { csvPaths: [csv], x: "fft_count", out, title: "one", slopes: [] },
      silent,
      silent,
    );
    expect(outcome.seriesCount).toBe(1);
    const svg = fs.readFileSync(out, "utf8");
    expect(svg.match(/class="series-point"/g)).toHaveLength(1);
    expect(svg).not.toContain("series-line");
  });

  it("fails when every row is dropped", () => {
    const csv = path.join(dir, "bad.csv");
    fs.writeFileSync(csv, [CSV_HEADER, "M,10,0.1,nan,nan,0,1.0,boom"].join("\n"));
    expect(() =>
      plotEfficiency(
        { csvPaths: [csv], x: "fft_count", out: path.join(dir, "x.svg"), title: "", slopes: [] },
        silent,
        silent,
      ),
    ).toThrow(/no plottable rows/);
  });

  it("produces identical bytes on re-render", () => {
    const csv = writeFig1Like();
    const a = path.join(dir, "a.svg");
    const b = path.join(dir, "b.svg");
    const spec = { csvPaths: [csv], x: "fft_count" as const, title: "d", slopes: [2, 4] };
    plotEfficiency({ ...spec, out: a }, silent, silent);
    plotEfficiency({ ...spec, out: b }, silent, silent);
    expect(fs.readFileSync(a, "utf8")).toBe(fs.readFileSync(b, "utf8"));
  });

  it("merges several CSVs", () => {
    const csv1 = writeFig1Like();
    const csv2 = path.join(dir, "extra.csv");
    fs.writeFileSync(
      csv2,
      [CSV_HEADER, "Y4,16,0.1875,1e-4,1.0,288,9.0,", "Y4,32,0.09375,6e-6,1.0,576,9.0,"].join("\n"),
    );
    const outcome = plotEfficiency(
      {
        csvPaths: [csv1, csv2],
        x: "fft_count",
        out: path.join(dir, "m.svg"),
        title: "m",
        slopes: [4],
      },
      silent,
      silent,
    );
    expect(outcome.seriesCount).toBe(3);
  });
});

describe("spec parsing", () => {
  it("reads a flat key = value file with paths relative to it", () => {
    const text = [
      "# comment",
      "csv = fig1.csv, other.csv",
      "x = n_steps",
      "out = figs/fig1.svg",
      "title = linear benchmark",
      "slopes = 2, 4",
    ].join("\n");
    const spec = parseSpecFile(text, "/base");
    expect(spec.csvPaths).toEqual(["/base/fig1.csv", "/base/other.csv"]);
    expect(spec.x).toBe("n_steps");
    expect(spec.out).toBe("/base/figs/fig1.svg");
    expect(spec.slopes).toEqual([2, 4]);
  });

  it("validates the axis choice and slope guides", () => {
    expect(() => buildSpec({ csv: "a.csv", x: "bogus" }, ".")).toThrow(/x axis/);
    expect(() => buildSpec({ csv: "a.csv", slopes: "2,nope" }, ".")).toThrow(/positive integers/);
    expect(() => buildSpec({}, ".")).toThrow(/csv/);
  });

  it("rejects malformed spec lines", () => {
    expect(() => parseSpecFile("just words\n", ".")).toThrow(/line 1/);
  });
});
