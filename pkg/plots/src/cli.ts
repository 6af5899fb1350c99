#!/usr/bin/env node
/** Batch renderer: sweep CSV in, SVG figure + numeric sidecar out. */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import { buildFigure, sidecarData, type XAxis, type YField } from "./figure.js";
import { parseSweepCsv, SchemaError } from "./schema.js";
import { renderSvg } from "./svg.js";

const X_CHOICES: Record<string, XAxis> = { eta: "eta", power: "power_dBm" };
const Y_CHOICES: Record<string, YField> = {
  bound: "air_bound",
  unbiased: "air_unbiased",
};

export interface CliResult {
  svgPath: string;
  sidecarPath: string;
  seriesCount: number;
}

export function run(argv: string[]): CliResult {
  const { values } = parseArgs({
    args: argv,
    options: {
      in: { type: "string" },
      out: { type: "string" },
      x: { type: "string", default: "eta" },
      y: { type: "string", default: "bound" },
      sidecar: { type: "string" },
      title: { type: "string" },
      width: { type: "string" },
      height: { type: "string" },
    },
  });
  if (!values.in || !values.out) {
    throw new SchemaError("usage: seqsel-plot --in sweep.csv --out figure.svg " +
      "[--x eta|power] [--y bound|unbiased] [--sidecar data.json] [--title ...]");
  }
  const xAxis = X_CHOICES[values.x!];
  const yField = Y_CHOICES[values.y!];
  if (!xAxis) throw new SchemaError(`--x must be eta or power, got "${values.x}"`);
  if (!yField) throw new SchemaError(`--y must be bound or unbiased, got "${values.y}"`);

  const text = readFileSync(values.in, "utf8");
  const { rows } = parseSweepCsv(text);
  const fig = buildFigure(rows, { xAxis, yField, title: values.title });
  const svg = renderSvg(fig, {
    width: values.width ? Number(values.width) : undefined,
    height: values.height ? Number(values.height) : undefined,
  });

  const sidecarPath = values.sidecar ?? values.out.replace(/\.svg$/, "") + ".json";
  writeFileSync(values.out, svg);
  writeFileSync(sidecarPath, JSON.stringify(sidecarData(fig), null, 1) + "\n");
  return { svgPath: values.out, sidecarPath, seriesCount: fig.series.length };
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedDirectly) {
  try {
    const res = run(process.argv.slice(2));
    console.log(`wrote ${res.svgPath} (${res.seriesCount} series) and ${res.sidecarPath}`);
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    process.exit(1);
  }
}
