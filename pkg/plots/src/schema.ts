import Papa from "papaparse";

/** Columns the sweep harness writes, in order.  Anything missing is a
 *  schema error; extra columns are tolerated and ignored. */
export const REQUIRED_COLUMNS = [
  "schema_version",
  "scheme",
  "axis",
  "axis_value",
  "N",
  "L",
  "M",
  "L_over_N",
  "p",
  "p1_over_p2",
  "G",
  "seed",
  "error_rate",
  "time_per_sample_s",
  "threshold_used",
  "solver_flags",
] as const;

export const SUPPORTED_SCHEMA_VERSION = "1";

/** One CSV row, all values as written (numbers still strings, "" = absent). */
export type RawRow = Record<string, string>;

export class SchemaError extends Error {
  readonly missing: string[];
  constructor(missing: string[]) {
    super(
      `results CSV is missing required column(s): ${missing.join(", ")}`,
    );
    this.name = "SchemaError";
    this.missing = missing;
  }
}

export class EmptyResultsError extends Error {
  constructor(detail: string) {
    super(`results CSV has no usable rows: ${detail}`);
    this.name = "EmptyResultsError";
  }
}

/** Parse harness CSV text into raw rows, enforcing header + version. */
export function parseResults(text: string): RawRow[] {
  const parsed = Papa.parse<RawRow>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) throw new SchemaError(missing);
  if (parsed.data.length === 0) throw new EmptyResultsError("file is empty");
  for (const row of parsed.data) {
    if (row["schema_version"] !== SUPPORTED_SCHEMA_VERSION) {
      throw new Error(
        `unsupported results schema_version ${JSON.stringify(
          row["schema_version"],
        )} (expected ${SUPPORTED_SCHEMA_VERSION})`,
      );
    }
  }
  return parsed.data;
}

/** Numeric cell access; "" maps to null, anything unparseable throws. */
export function numeric(row: RawRow, col: string): number | null {
  const raw = row[col];
  if (raw === undefined || raw === "") return null;
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new Error(`non-numeric value ${JSON.stringify(raw)} in column ${col}`);
  }
  return v;
}
