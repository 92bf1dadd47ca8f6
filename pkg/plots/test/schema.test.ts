import { describe, expect, it } from "vitest";
import {
  EmptyResultsError,
  parseResults,
  REQUIRED_COLUMNS,
  SchemaError,
} from "../src/schema";
import { csvOf } from "./helpers";

describe("results CSV parsing", () => {
  it("accepts a well-formed file", () => {
    const rows = parseResults(csvOf([{}, { scheme: "glasso" }]));
    expect(rows).toHaveLength(2);
    expect(rows[1]!["scheme"]).toBe("glasso");
  });

  it("names every missing column in the schema error", () => {
    const kept = REQUIRED_COLUMNS.filter(
      (c) => c !== "error_rate" && c !== "solver_flags",
    );
    const text = kept.join(",") + "\n" + kept.map(() => "1").join(",") + "\n";
    let err: unknown;
    try {
      parseResults(text);
    } catch (e) {
      err = e;
    }
    expect(err).toBeInstanceOf(SchemaError);
    expect((err as SchemaError).missing).toEqual([
      "error_rate",
      "solver_flags",
    ]);
    expect((err as SchemaError).message).toContain("error_rate");
    expect((err as SchemaError).message).toContain("solver_flags");
  });

  it("rejects a header-only file explicitly", () => {
    const text = REQUIRED_COLUMNS.join(",") + "\n";
    expect(() => parseResults(text)).toThrow(EmptyResultsError);
  });

  it("rejects unknown schema versions", () => {
    expect(() => parseResults(csvOf([{ schema_version: "99" }]))).toThrow(
      /schema_version/,
    );
  });
});
