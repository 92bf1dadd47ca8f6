import { REQUIRED_COLUMNS } from "../src/schema";

/** Build a results CSV string from partial row specs (test fixture aid). */
export function csvOf(rows: Array<Partial<Record<string, string>>>): string {
  const defaults: Record<string, string> = {
    schema_version: "1",
    scheme: "proposed",
    axis: "L_over_N",
    axis_value: "0.14",
    N: "100",
    L: "14",
    M: "4",
    L_over_N: "0.14",
    p: "0.1",
    p1_over_p2: "3.0",
    G: "10",
    seed: "0",
    error_rate: "0.05",
    time_per_sample_s: "0.001",
    threshold_used: "0.5",
    solver_flags: "",
  };
  const header = REQUIRED_COLUMNS.join(",");
  const body = rows.map((r) =>
    REQUIRED_COLUMNS.map((c) => r[c] ?? defaults[c]).join(","),
  );
  return [header, ...body].join("\n") + "\n";
}
