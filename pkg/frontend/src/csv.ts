/** Strict reader for the audit harness results CSV. */

export class SchemaError extends Error {}

export interface ResultRow {
  algorithm: string;
  values: Record<string, number | null>;
}

function splitLine(line: string): string[] {
  // The emitter never quotes, but tolerate simple double-quoted fields.
  const out: string[] = [];
  let cur = "";
  let quoted = false;
  for (const ch of line) {
    if (ch === '"') {
      quoted = !quoted;
    } else if (ch === "," && !quoted) {
      out.push(cur);
      cur = "";
    } else {
      cur += ch;
    }
  }
  out.push(cur);
  return out;
}

export function parseResultsCsv(text: string): { columns: string[]; rows: ResultRow[] } {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const columns = splitLine(lines[0]);
  if (!columns.includes("algorithm")) {
    throw new SchemaError("missing required column: algorithm");
  }
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = splitLine(lines[i]);
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `row ${i + 1}: expected ${columns.length} fields, got ${parts.length}`
      );
    }
    const values: Record<string, number | null> = {};
    let algorithm = "";
    columns.forEach((col, j) => {
      const raw = parts[j];
      if (col === "algorithm") {
        algorithm = raw;
        return;
      }
      if (raw === "" || raw === "true" || raw === "false") {
        values[col] = raw === "" ? null : raw === "true" ? 1 : 0;
        return;
      }
      const v = Number(raw);
      values[col] = Number.isFinite(v) ? v : null;
    });
    rows.push({ algorithm, values });
  }
  if (rows.length === 0) {
    throw new SchemaError("empty CSV: header but no data rows");
  }
  return { columns, rows };
}
