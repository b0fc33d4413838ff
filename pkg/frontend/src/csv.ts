/** Strict parser for the numeric CSV files the experiment CLI emits. */

export interface Table {
  /** Column names from the first line, in file order. */
  header: string[];
  /** One entry per data line, each as long as the header. */
  rows: number[][];
}

/** Raised for structural problems; `line` is 1-based. */
export class CsvParseError extends Error {
  readonly line: number;

  constructor(line: number, message: string) {
    super(`line ${line}: ${message}`);
    this.name = "CsvParseError";
    this.line = line;
  }
}

/**
 * Parse a comma-separated table of finite numbers under a header line.
 *
 * The format is deliberately rigid — it mirrors what the generator
 * guarantees: a nonempty header of unique, nonempty names, and data
 * lines with exactly one finite decimal number per column. Anything
 * else raises `CsvParseError` with the offending line number.
 */
export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop(); // trailing newline(s)
  }
  if (lines.length === 0) {
    throw new CsvParseError(1, "file is empty");
  }
  const header = lines[0].split(",");
  if (header.some((name) => name.trim() === "")) {
    throw new CsvParseError(1, "header has an empty column name");
  }
  if (new Set(header).size !== header.length) {
    throw new CsvParseError(1, "header has duplicate column names");
  }
  if (lines.length === 1) {
    throw new CsvParseError(1, "no data lines after the header");
  }

  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i += 1) {
    const lineNo = i + 1;
    if (lines[i] === "") {
      throw new CsvParseError(lineNo, "blank line inside the table");
    }
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new CsvParseError(
        lineNo,
        `expected ${header.length} cells, found ${cells.length}`,
      );
    }
    const row = cells.map((cell, j) => {
      const value = Number(cell);
      if (cell.trim() === "" || !Number.isFinite(value)) {
        throw new CsvParseError(
          lineNo,
          `column "${header[j]}" has non-numeric cell "${cell}"`,
        );
      }
      return value;
    });
    rows.push(row);
  }
  return { header, rows };
}

/** Extract one column by name; the caller has validated its presence. */
export function column(table: Table, name: string): number[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new CsvParseError(1, `column "${name}" not in header`);
  }
  return table.rows.map((row) => row[index]);
}
