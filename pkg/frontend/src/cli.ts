#!/usr/bin/env node
/** plot-audit: render an audit results CSV as a figure.
 *
 *   plot-audit --csv results.csv --kind cost_vs_tau --out fig.svg
 *              [--true-eod 0.2] [--series rs_audit,baseline]
 *
 * The output format follows the file extension (.svg or .png).
 * Exit codes: 0 ok, 2 bad arguments or schema, 3 I/O failure.
 */

import * as fs from "fs";

import { SchemaError } from "./csv";
import { figureFromCsv, PlotKind, PLOT_KINDS } from "./figure";
import { renderSvg } from "./svg";

interface Args {
  csv: string;
  kind: PlotKind;
  out: string;
  trueEod?: number;
  series?: string[];
}

function usage(): string {
  return (
    "usage: plot-audit --csv <file> --kind <" +
    PLOT_KINDS.join("|") +
    "> --out <file.svg|file.png> [--true-eod <v>] [--series a,b]"
  );
}

function parseArgs(argv: string[]): Args {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new SchemaError(usage());
    }
    flags.set(key.slice(2), value);
  }
  const csv = flags.get("csv");
  const kind = flags.get("kind") as PlotKind | undefined;
  const out = flags.get("out");
  if (!csv || !kind || !out) {
    throw new SchemaError(usage());
  }
  if (!PLOT_KINDS.includes(kind)) {
    throw new SchemaError(`unknown kind ${kind}; expected one of ${PLOT_KINDS.join(", ")}`);
  }
  if (!(out.endsWith(".svg") || out.endsWith(".png"))) {
    throw new SchemaError("output file must end in .svg or .png");
  }
  const args: Args = { csv, kind, out };
  const te = flags.get("true-eod");
  if (te !== undefined) {
    const v = Number(te);
    if (!Number.isFinite(v)) throw new SchemaError(`--true-eod must be a number, got ${te}`);
    args.trueEod = v;
  }
  const series = flags.get("series");
  if (series !== undefined) {
    args.series = series.split(",").filter((s) => s.length > 0);
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 2;
  }
  let text: string;
  try {
    text = fs.readFileSync(args.csv, "utf-8");
  } catch (err) {
    process.stderr.write(`cannot read ${args.csv}: ${(err as Error).message}\n`);
    return 3;
  }
  let svg: string;
  try {
    const figure = figureFromCsv(text, args.kind, {
      trueEod: args.trueEod,
      series: args.series,
    });
    svg = renderSvg(figure);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
  try {
    if (args.out.endsWith(".png")) {
      // lazy import: SVG-only use works even if the rasterizer is missing
      const { Resvg } = require("@resvg/resvg-js");
      const png = new Resvg(svg, { fitTo: { mode: "width", value: 1280 } })
        .render()
        .asPng();
      fs.writeFileSync(args.out, png);
    } else {
      fs.writeFileSync(args.out, svg + "\n");
    }
  } catch (err) {
    process.stderr.write(`cannot write ${args.out}: ${(err as Error).message}\n`);
    return 3;
  }
  process.stdout.write(`wrote ${args.out}\n`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
