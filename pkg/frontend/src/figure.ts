/** Figure model: what gets drawn, exposed for inspection by tests. */

import { parseResultsCsv, ResultRow, SchemaError } from "./csv";

export type PlotKind = "cost_vs_tau" | "eod_vs_samples" | "eod_vs_eps" | "cost_vs_eps";

export interface SeriesPoint {
  x: number;
  y: number;
  err: number | null;
}

export interface Series {
  name: string;
  points: SeriesPoint[];
}

export interface Figure {
  kind: PlotKind;
  xLabel: string;
  yLabel: string;
  xScale: "linear" | "log";
  /** eps axes are drawn descending to follow the cost-vs-tolerance narrative */
  xDescending: boolean;
  series: Series[];
  refLines: { y: number; label: string }[];
}

interface KindSpec {
  x: string;
  y: string;
  err: string;
  xLabel: string;
  yLabel: string;
  log: boolean;
  descending: boolean;
}

const KINDS: Record<PlotKind, KindSpec> = {
  cost_vs_tau: {
    x: "sweep_value",
    y: "mean_cost",
    err: "std_cost",
    xLabel: "stopping threshold tau",
    yLabel: "mean audit cost",
    log: false,
    descending: false,
  },
  eod_vs_samples: {
    x: "mean_samples",
    y: "mean_delta_hat",
    err: "std_delta_hat",
    xLabel: "mean samples drawn",
    yLabel: "estimated EOD",
    log: false,
    descending: false,
  },
  eod_vs_eps: {
    x: "sweep_value",
    y: "mean_delta_hat",
    err: "std_delta_hat",
    xLabel: "tolerance eps",
    yLabel: "estimated EOD",
    log: true,
    descending: true,
  },
  cost_vs_eps: {
    x: "sweep_value",
    y: "mean_cost",
    err: "std_cost",
    xLabel: "tolerance eps",
    yLabel: "mean audit cost",
    log: true,
    descending: true,
  },
};

export const PLOT_KINDS = Object.keys(KINDS) as PlotKind[];

export interface BuildOptions {
  trueEod?: number;
  series?: string[]; // algorithms to include; default every one present
}

export function buildFigure(
  columns: string[],
  rows: ResultRow[],
  kind: PlotKind,
  opts: BuildOptions = {}
): Figure {
  const spec = KINDS[kind];
  if (!spec) {
    throw new SchemaError(`unknown plot kind: ${kind}`);
  }
  for (const col of [spec.x, spec.y, spec.err]) {
    if (!columns.includes(col)) {
      throw new SchemaError(`kind ${kind} requires column ${col}`);
    }
  }
  const wanted = opts.series;
  const byAlg = new Map<string, SeriesPoint[]>();
  for (const row of rows) {
    if (wanted && !wanted.includes(row.algorithm)) continue;
    const x = row.values[spec.x];
    const y = row.values[spec.y];
    if (x === null || y === null) {
      throw new SchemaError(`row for ${row.algorithm}: non-numeric ${spec.x}/${spec.y}`);
    }
    if (spec.log && x <= 0) {
      throw new SchemaError(`log-scale x requires positive ${spec.x}, got ${x}`);
    }
    if (!byAlg.has(row.algorithm)) byAlg.set(row.algorithm, []);
    byAlg.get(row.algorithm)!.push({ x, y, err: row.values[spec.err] });
  }
  if (byAlg.size === 0) {
    throw new SchemaError("no rows matched the requested series");
  }
  const series: Series[] = [...byAlg.keys()].sort().map((name) => ({
    name,
    points: byAlg
      .get(name)!
      .slice()
      .sort((a, b) => a.x - b.x),
  }));
  const refLines =
    opts.trueEod === undefined ? [] : [{ y: opts.trueEod, label: "true EOD" }];
  return {
    kind,
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
    xScale: spec.log ? "log" : "linear",
    xDescending: spec.descending,
    series,
    refLines,
  };
}

export function figureFromCsv(text: string, kind: PlotKind, opts: BuildOptions = {}): Figure {
  const { columns, rows } = parseResultsCsv(text);
  return buildFigure(columns, rows, kind, opts);
}
