/** Parsing of rotsplit ConvergenceRecord CSVs (fixed schema). */

export const CSV_HEADER =
  "method,n_steps,h,l2_error,final_norm,fft_count,wall_time_ms,note";

export interface ConvergenceRecord {
  method: string;
  n_steps: number;
  h: number;
  l2_error: number;
  final_norm: number;
  fft_count: number;
  wall_time_ms: number;
  note: string;
}

export interface ParseResult {
  records: ConvergenceRecord[];
  dropped: number; // rows with non-finite error (solver failures)
}

export function parseCsv(text: string, warn: (msg: string) => void = () => {}): ParseResult {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  if (lines[0].trim() !== CSV_HEADER) {
    throw new Error(`unexpected CSV header: ${lines[0]} (want ${CSV_HEADER})`);
  }
  const records: ConvergenceRecord[] = [];
  let dropped = 0;
  for (const line of lines.slice(1)) {
    // note is the last field and may be empty but never contains commas
    const parts = line.split(",");
    if (parts.length < 8) {
      throw new Error(`malformed CSV row: ${line}`);
    }
    const rec: ConvergenceRecord = {
      method: parts[0],
      n_steps: Number(parts[1]),
      h: Number(parts[2]),
      l2_error: Number(parts[3]),
      final_norm: Number(parts[4]),
      fft_count: Number(parts[5]),
      wall_time_ms: Number(parts[6]),
      note: parts.slice(7).join(","),
    };
    if (!Number.isFinite(rec.n_steps) || !Number.isFinite(rec.h)) {
      throw new Error(`malformed CSV row: ${line}`);
    }
    if (!Number.isFinite(rec.l2_error) || rec.l2_error <= 0) {
      dropped += 1;
      warn(`dropping row (${rec.method}, n=${rec.n_steps}): ` +
        `error=${parts[3]}${rec.note ? ` note=${rec.note}` : ""}`);
      continue;
    }
    records.push(rec);
  }
  return { records, dropped };
}

/** Group records by method, each sorted by ascending step count. */
export function byMethod(records: ConvergenceRecord[]): Map<string, ConvergenceRecord[]> {
  const groups = new Map<string, ConvergenceRecord[]>();
  for (const r of records) {
    const list = groups.get(r.method) ?? [];
    list.push(r);
    groups.set(r.method, list);
  }
  for (const list of groups.values()) {
    list.sort((a, b) => a.n_steps - b.n_steps);
  }
  return new Map([...groups.entries()].sort(([a], [b]) => (a < b ? -1 : 1)));
}
