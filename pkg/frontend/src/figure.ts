import { readFileSync, writeFileSync } from "node:fs";

import { CsvTable, columnIndex, numericColumn, parseCsv } from "./csv";
import { Curve, renderLogLogChart } from "./chart";
import { fitLogLogSlope } from "./powerlaw";

export type GroupColumn = "lambda" | "mu";

export interface PlotSpec {
  csvPath: string;
  groupBy: GroupColumn;
  outPath: string;
  title: string;
}

export interface RenderResult {
  svgPath: string;
  reportPath: string;
  report: string;
  /** rows where the equilibrium value beats the static baseline */
  flaggedRows: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const BASELINE_COLOR = "#555555";

interface Series {
  label: string;
  xs: number[];
  ys: number[];
}

/** Distinct raw values of one column, ordered ascending by numeric value. */
function groupValues(table: CsvTable, idx: number): string[] {
  const seen = new Set<string>();
  for (const row of table.rows) {
    seen.add(row[idx]);
  }
  return Array.from(seen).sort((a, b) => Number(a) - Number(b));
}

function sortByX(series: Series): Series {
  const order = series.xs
    .map((_, i) => i)
    .sort((a, b) => series.xs[a] - series.xs[b]);
  return {
    label: series.label,
    xs: order.map((i) => series.xs[i]),
    ys: order.map((i) => series.ys[i]),
  };
}

function buildSeries(table: CsvTable, groupBy: GroupColumn): Series[] {
  const groupIdx = columnIndex(table, groupBy);
  const nOthers = numericColumn(table, "n_others");
  const mpe = numericColumn(table, "mpe_utility");
  const sne = numericColumn(table, "sne_utility");

  const series: Series[] = [];
  for (const value of groupValues(table, groupIdx)) {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < table.rows.length; i++) {
      if (table.rows[i][groupIdx] === value) {
        xs.push(nOthers[i]);
        ys.push(mpe[i]);
      }
    }
    series.push(sortByX({ label: `mpe ${groupBy}=${value}`, xs, ys }));
  }

  // the static baseline is rate-free, so one dashed curve covers every
  // group value; first row per n_others wins
  const seenX = new Set<number>();
  const baseline: Series = { label: "sne baseline", xs: [], ys: [] };
  for (let i = 0; i < table.rows.length; i++) {
    if (!seenX.has(nOthers[i])) {
      seenX.add(nOthers[i]);
      baseline.xs.push(nOthers[i]);
      baseline.ys.push(sne[i]);
    }
  }
  series.push(sortByX(baseline));
  return series;
}

function slopeLine(series: Series): string {
  const fit = fitLogLogSlope(series.xs, series.ys);
  const tail = `(points ${fit.used}, skipped ${fit.skipped})`;
  if (fit.reason !== null) {
    return `curve ${series.label}: ${fit.reason} ${tail}`;
  }
  return `curve ${series.label}: slope ${fit.slope.toPrecision(6)} ${tail}`;
}

export function render(spec: PlotSpec): RenderResult {
  const text = readFileSync(spec.csvPath, "utf8");
  const table = parseCsv(text);
  const series = buildSeries(table, spec.groupBy);

  const mpe = numericColumn(table, "mpe_utility");
  const sne = numericColumn(table, "sne_utility");
  let flaggedRows = 0;
  for (let i = 0; i < mpe.length; i++) {
    if (mpe[i] > sne[i]) flaggedRows++;
  }

  const curves: Curve[] = series.map((s, i) => {
    const isBaseline = i === series.length - 1;
    return {
      label: s.label,
      xs: s.xs,
      ys: s.ys,
      color: isBaseline ? BASELINE_COLOR : PALETTE[i % PALETTE.length],
      dashed: isBaseline,
    };
  });

  const svg = renderLogLogChart(curves, {
    title: spec.title,
    xLabel: "other players present",
    yLabel: "expected utility",
  });

  const lines = [
    `figure: ${spec.title}`,
    `source: ${spec.csvPath}`,
    `group by: ${spec.groupBy}`,
    ...series.map(slopeLine),
    `rows where mpe_utility > sne_utility: ${flaggedRows}`,
  ];
  const report = lines.join("\n") + "\n";

  const reportPath = spec.outPath.endsWith(".svg")
    ? spec.outPath.slice(0, -4) + ".slopes.txt"
    : spec.outPath + ".slopes.txt";
  writeFileSync(spec.outPath, svg, "utf8");
  writeFileSync(reportPath, report, "utf8");
  return { svgPath: spec.outPath, reportPath, report, flaggedRows };
}
