export { CSV_COLUMNS, parseSweepCsv, SchemaError } from "./schema.js";
export type { ColumnName, SweepFile, SweepRow } from "./schema.js";
export { buildFigure, sidecarData } from "./figure.js";
export type { Figure, PlotSpec, Series, XAxis, YField } from "./figure.js";
export { renderSvg } from "./svg.js";
export type { RenderOptions } from "./svg.js";
export { run } from "./cli.js";
export type { CliResult } from "./cli.js";
