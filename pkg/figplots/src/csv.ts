/** CSV ingestion with schema validation against the figure kind. */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

import type { FigureSchema } from "./spec.js";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  /** column name -> numeric values */
  data: Map<string, number[]>;
  rows: number;
}

export function loadCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: malformed CSV (${first.message} at row ${first.row})`);
  }
  const columns = (parsed.meta.fields ?? []).filter((c) => c.length > 0);
  if (columns.length === 0 || parsed.data.length === 0) {
    throw new SchemaError(`${path}: empty CSV, expected a header row plus data`);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (const row of parsed.data) {
    for (const c of columns) {
      const value = Number(row[c]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`${path}: non-numeric value ${JSON.stringify(row[c])} in column '${c}'`);
      }
      data.get(c)!.push(value);
    }
  }
  return { columns, data, rows: parsed.data.length };
}

export function validateSchema(table: Table, schema: FigureSchema, path: string): void {
  const required = [schema.xColumn, ...schema.series.map((s) => s.column)];
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing column(s) ${missing.join(", ")}; found ${table.columns.join(", ")}`,
    );
  }
}
