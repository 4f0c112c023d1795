/** Least-squares convergence-slope fit, matching the benchmark CLI's
 * definition: slope of log(error) against log(h) over the finest
 * (largest step count) rows of one method. */

import { ConvergenceRecord } from "./records.js";

export function leastSquaresSlope(xs: number[], ys: number[]): number {
  const n = xs.length;
  if (n < 2) {
    return NaN;
  }
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let sxy = 0;
  let sxx = 0;
  for (let i = 0; i < n; i++) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

export function fittedSlope(records: ConvergenceRecord[], nPoints = 3): number {
  const rows = [...records]
    .sort((a, b) => a.n_steps - b.n_steps)
    .slice(-nPoints);
  if (rows.length < 2) {
    return NaN;
  }
  return leastSquaresSlope(
    rows.map((r) => Math.log(r.h)),
    rows.map((r) => Math.log(r.l2_error)),
  );
}
