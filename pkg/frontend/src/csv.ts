/**
 * Minimal reader for the sweep CSV schema. The producer never quotes or
 * escapes fields, so a plain split is exact here.
 */

export interface CsvTable {
  columns: string[];
  rows: string[][];
}

export class MissingColumnError extends Error {
  column: string;

  constructor(column: string) {
    super(`missing column: ${column}`);
    this.column = column;
  }
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new Error("empty CSV: no header line");
  }
  const columns = lines[0].split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== columns.length) {
      throw new Error(
        `line ${i + 1}: expected ${columns.length} fields, got ${fields.length}`
      );
    }
    rows.push(fields);
  }
  return { columns, rows };
}

export function columnIndex(table: CsvTable, name: string): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new MissingColumnError(name);
  }
  return idx;
}

/** Column as numbers; the producer spells missing values "nan". */
export function numericColumn(table: CsvTable, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => Number(row[idx]));
}
