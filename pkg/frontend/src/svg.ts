/** Hand-rolled deterministic SVG for log-log efficiency curves. */

export interface Series {
  name: string;
  xs: number[]; // cost (n_steps or fft_count), ascending
  ys: number[]; // l2 errors
}

export interface FigureOptions {
  title: string;
  xLabel: string;
  slopeGuides: number[]; // orders p; guides drawn with slope -p vs cost
  width?: number;
  height?: number;
}

const PALETTE = ["#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085"];
const MARGIN = { left: 70, right: 170, top: 44, bottom: 52 };

function fmt(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

function pow10Label(v: number): string {
  const e = Math.round(Math.log10(v));
  return `1e${e}`;
}

export function renderFigure(series: Series[], opts: FigureOptions): string {
  const width = opts.width ?? 760;
  const height = opts.height ?? 560;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  const xLo = Math.min(...allX) / 1.2;
  const xHi = Math.max(...allX) * 1.2;
  const yLo = Math.min(...allY) / 2;
  const yHi = Math.max(...allY) * 2;

  const px = (x: number) =>
    MARGIN.left + ((Math.log10(x) - Math.log10(xLo)) / (Math.log10(xHi) - Math.log10(xLo))) * plotW;
  const py = (y: number) =>
    MARGIN.top + plotH - ((Math.log10(y) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="24" text-anchor="middle" font-size="16">` +
      `${opts.title}</text>`,
  );

  for (const t of decadeTicks(xLo, xHi)) {
    const x = px(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + plotH}" ` +
        `stroke="#ddd" stroke-width="0.6"/>`,
      `<text x="${fmt(x)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
        `font-size="11">${pow10Label(t)}</text>`,
    );
  }
  for (const t of decadeTicks(yLo, yHi)) {
    const y = py(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" ` +
        `stroke="#ddd" stroke-width="0.6"/>`,
      `<text x="${MARGIN.left - 6}" y="${fmt(y + 4)}" text-anchor="end" ` +
        `font-size="11">${pow10Label(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" text-anchor="middle" ` +
      `font-size="13">${opts.xLabel}</text>`,
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">L2 error</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    if (s.xs.length > 1) {
      const pts = s.xs.map((x, k) => `${fmt(px(x))},${fmt(py(s.ys[k]))}`).join(" ");
      parts.push(
        `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8" ` +
          `class="series-line"/>`,
      );
    }
    s.xs.forEach((x, k) => {
      parts.push(
        `<circle cx="${fmt(px(x))}" cy="${fmt(py(s.ys[k]))}" r="3.4" fill="${color}" ` +
          `class="series-point"/>`,
      );
    });
    const ly = MARGIN.top + 14 + i * 18;
    parts.push(
      `<line x1="${width - MARGIN.right + 12}" y1="${ly - 4}" ` +
        `x2="${width - MARGIN.right + 34}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"/>`,
      `<text x="${width - MARGIN.right + 40}" y="${ly}" font-size="12">${s.name}</text>`,
    );
  });

  // order-guide triangles: hypotenuse with slope -p against cost, anchored
  // below the data cloud at the right edge
  opts.slopeGuides.forEach((p, i) => {
    const x1 = Math.max(...allX) / 2.4;
    const x2 = Math.max(...allX);
    const yAnchor = Math.min(...allY) / (3 * Math.pow(2.5, i));
    const y2 = yAnchor;
    const y1 = y2 * Math.pow(x2 / x1, p);
    const ax = px(x1);
    const bx = px(x2);
    const ay = py(y1);
    const by = py(y2);
    parts.push(
      `<path d="M ${fmt(ax)} ${fmt(ay)} L ${fmt(bx)} ${fmt(by)} L ${fmt(ax)} ${fmt(by)} Z" ` +
        `fill="none" stroke="#555" stroke-width="1" class="slope-guide"/>`,
      `<text x="${fmt(ax - 6)}" y="${fmt((ay + by) / 2)}" text-anchor="end" ` +
        `font-size="11" fill="#555">${p}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
