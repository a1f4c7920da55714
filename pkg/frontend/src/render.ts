/** CSV -> figure translation: validate the aggregate schema, split rows into
 *  series per the figure spec, and emit the SVG text. Pure file-to-file
 *  transform; the input is never modified. */

import { num, parseCsv, Table } from "./csv.js";
import { FigureSpec, figureSpec } from "./spec.js";
import { renderChart, Series } from "./svg.js";

export class MissingColumnsError extends Error {
  constructor(public missing: string[], public available: string[]) {
    super(
      `CSV is missing required columns: ${missing.join(", ")} ` +
      `(available: ${available.join(", ")})`,
    );
  }
}

function requiredColumns(spec: FigureSpec): string[] {
  const cols = [spec.xColumn];
  if (spec.groupColumn) cols.push(spec.groupColumn);
  for (const s of spec.series) {
    cols.push(s.yColumn);
    if (s.seColumn) cols.push(s.seColumn);
  }
  return [...new Set(cols)];
}

export function buildSeries(table: Table, spec: FigureSpec): Series[] {
  const missing = requiredColumns(spec).filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new MissingColumnsError(missing, table.columns);
  }
  if (table.rows.length === 0) {
    throw new Error("CSV has no aggregate rows; refusing to render an empty plot");
  }

  const groups: string[] = spec.groupColumn
    ? [...new Set(table.rows.map((r) => r[spec.groupColumn!]))]
    : [""];
  // numeric ordering keeps legends stable regardless of row order
  groups.sort((a, b) => Number(a) - Number(b));

  const out: Series[] = [];
  for (const g of groups) {
    const rows = spec.groupColumn
      ? table.rows.filter((r) => r[spec.groupColumn!] === g)
      : table.rows;
    for (const s of spec.series) {
      const points = rows.map((r) => ({
        x: num(r, spec.xColumn),
        y: num(r, s.yColumn),
        se: s.seColumn && r[s.seColumn] !== "" ? num(r, s.seColumn) : undefined,
      }));
      out.push({ label: s.label.replace("#g", formatGroup(g)), points });
    }
  }
  return out;
}

function formatGroup(g: string): string {
  const v = Number(g);
  return Number.isFinite(v) ? String(Math.round(v * 1000) / 1000) : g;
}

export function renderFigure(csvText: string, preset: string): string {
  const spec = figureSpec(preset);
  const table = parseCsv(csvText);
  const series = buildSeries(table, spec);
  return renderChart({
    title: spec.title,
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
    series,
  });
}
