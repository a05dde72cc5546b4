/**
 * Hand-rolled SVG scatter/line chart on log-log axes. No chart library:
 * the output has to be byte-stable across runs and environments, and the
 * feature set (decade grid, polylines, a legend) is small enough to own.
 */

export interface Curve {
  label: string;
  xs: number[];
  ys: number[];
  color: string;
  dashed: boolean;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
}

const MARGIN = { top: 48, right: 24, bottom: 56, left: 76 };
const MARKER_LIMIT = 24;

function drawable(x: number, y: number): boolean {
  return Number.isFinite(x) && Number.isFinite(y) && x > 0 && y > 0;
}

function decadeLabel(k: number): string {
  if (k >= 0 && k <= 6) {
    return (10 ** k).toString();
  }
  if (k >= -4 && k < 0) {
    return (10 ** k).toFixed(-k);
  }
  return `1e${k}`;
}

interface LogScale {
  lo: number;
  hi: number;
  map: (v: number) => number;
}

function logScale(values: number[], rangeLo: number, rangeHi: number): LogScale {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    const d = Math.log10(v);
    if (d < lo) lo = d;
    if (d > hi) hi = d;
  }
  lo = Math.floor(lo);
  hi = Math.ceil(hi);
  if (hi === lo) hi = lo + 1;
  const span = hi - lo;
  const map = (v: number) =>
    rangeLo + ((Math.log10(v) - lo) / span) * (rangeHi - rangeLo);
  return { lo, hi, map };
}

export function renderLogLogChart(curves: Curve[], opts: ChartOptions): string {
  const width = opts.width ?? 760;
  const height = opts.height ?? 520;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const xsAll: number[] = [];
  const ysAll: number[] = [];
  for (const curve of curves) {
    for (let i = 0; i < curve.xs.length; i++) {
      if (drawable(curve.xs[i], curve.ys[i])) {
        xsAll.push(curve.xs[i]);
        ysAll.push(curve.ys[i]);
      }
    }
  }

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${width / 2}" y="26" text-anchor="middle" font-size="16" ` +
      `font-weight="600">${escapeXml(opts.title)}</text>`
  );

  if (xsAll.length === 0) {
    parts.push(
      `<text x="${width / 2}" y="${height / 2}" text-anchor="middle" ` +
        `font-size="14" fill="#666">no plottable points</text>`
    );
    parts.push("</svg>");
    return parts.join("\n") + "\n";
  }

  const x = logScale(xsAll, MARGIN.left, MARGIN.left + innerW);
  const y = logScale(ysAll, MARGIN.top + innerH, MARGIN.top);

  // decade grid; thin the labels if the span is very wide
  const xStep = Math.max(1, Math.ceil((x.hi - x.lo) / 10));
  const yStep = Math.max(1, Math.ceil((y.hi - y.lo) / 10));
  for (let k = x.lo; k <= x.hi; k += xStep) {
    const px = x.map(10 ** k).toFixed(2);
    parts.push(
      `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${MARGIN.top + innerH}" ` +
        `stroke="#e0e0e0" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${px}" y="${MARGIN.top + innerH + 18}" text-anchor="middle" ` +
        `font-size="11" fill="#444">${decadeLabel(k)}</text>`
    );
  }
  for (let k = y.lo; k <= y.hi; k += yStep) {
    const py = y.map(10 ** k).toFixed(2);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py}" x2="${MARGIN.left + innerW}" y2="${py}" ` +
        `stroke="#e0e0e0" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${py}" text-anchor="end" dy="4" ` +
        `font-size="11" fill="#444">${decadeLabel(k)}</text>`
    );
  }

  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + innerH}" x2="${MARGIN.left + innerW}" ` +
      `y2="${MARGIN.top + innerH}" stroke="#222" stroke-width="1"/>`
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
      `y2="${MARGIN.top + innerH}" stroke="#222" stroke-width="1"/>`
  );
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${height - 14}" text-anchor="middle" ` +
      `font-size="13" fill="#222">${escapeXml(opts.xLabel)}</text>`
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + innerH / 2}" text-anchor="middle" font-size="13" ` +
      `fill="#222" transform="rotate(-90 20 ${MARGIN.top + innerH / 2})">` +
      `${escapeXml(opts.yLabel)}</text>`
  );

  for (const curve of curves) {
    const dash = curve.dashed ? ` stroke-dasharray="6 4"` : "";
    const segments: string[][] = [];
    let current: string[] = [];
    let shown = 0;
    for (let i = 0; i < curve.xs.length; i++) {
      if (drawable(curve.xs[i], curve.ys[i])) {
        current.push(`${x.map(curve.xs[i]).toFixed(2)},${y.map(curve.ys[i]).toFixed(2)}`);
        shown++;
      } else if (current.length > 0) {
        segments.push(current);
        current = [];
      }
    }
    if (current.length > 0) segments.push(current);

    for (const seg of segments) {
      if (seg.length >= 2) {
        parts.push(
          `<polyline points="${seg.join(" ")}" fill="none" stroke="${curve.color}" ` +
            `stroke-width="1.5"${dash}/>`
        );
      }
    }
    // markers keep sparse curves and isolated points visible
    for (const seg of segments) {
      if (shown <= MARKER_LIMIT || seg.length === 1) {
        for (const pt of seg) {
          const [px, py] = pt.split(",");
          parts.push(`<circle cx="${px}" cy="${py}" r="3" fill="${curve.color}"/>`);
        }
      }
    }
  }

  const legendX = MARGIN.left + innerW - 180;
  let legendY = MARGIN.top + 10;
  parts.push(
    `<rect x="${legendX - 8}" y="${legendY - 6}" width="186" ` +
      `height="${curves.length * 18 + 10}" fill="#ffffff" fill-opacity="0.85" ` +
      `stroke="#cccccc" stroke-width="1"/>`
  );
  for (const curve of curves) {
    const dash = curve.dashed ? ` stroke-dasharray="6 4"` : "";
    const cy = legendY + 6;
    parts.push(
      `<line x1="${legendX}" y1="${cy}" x2="${legendX + 26}" y2="${cy}" ` +
        `stroke="${curve.color}" stroke-width="1.5"${dash}/>`
    );
    parts.push(
      `<text x="${legendX + 32}" y="${cy + 4}" font-size="11" fill="#222">` +
        `${escapeXml(curve.label)}</text>`
    );
    legendY += 18;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
