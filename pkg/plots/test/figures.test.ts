import { describe, expect, it } from "vitest";
import { buildPanel, FIGURES } from "../src/figures";
import { EmptyResultsError, parseResults } from "../src/schema";
import { csvOf } from "./helpers";

function seedRows(scheme: string, x: string, errs: number[]) {
  return errs.map((e, i) => ({
    scheme,
    axis: "L_over_N",
    axis_value: x,
    L_over_N: x,
    seed: String(i),
    error_rate: String(e),
  }));
}

describe("panel aggregation", () => {
  it("takes the median with a min-max spread across seeds", () => {
    const rows = parseResults(
      csvOf([
        ...seedRows("proposed", "0.08", [0.3, 0.1, 0.2]),
        ...seedRows("proposed", "0.14", [0.05, 0.07, 0.06]),
      ]),
    );
    const panel = buildPanel(rows, "err-vs-L");
    expect(panel.curves).toHaveLength(1);
    expect(panel.curves[0]!.points).toEqual([
      { x: 0.08, median: 0.2, min: 0.1, max: 0.3, n: 3 },
      { x: 0.14, median: 0.06, min: 0.05, max: 0.07, n: 3 },
    ]);
  });

  it("averages the middle pair for an even seed count", () => {
    const rows = parseResults(
      csvOf(seedRows("proposed", "0.08", [0.4, 0.1, 0.2, 0.3])),
    );
    const p = buildPanel(rows, "err-vs-L").curves[0]!.points[0]!;
    expect(p.median).toBe((0.2 + 0.3) / 2);
    expect(p.n).toBe(4);
  });

  it("omits flagged rows and reports them for the footnote", () => {
    const rows = parseResults(
      csvOf([
        ...seedRows("amp", "0.08", [0.2, 0.25]),
        {
          scheme: "amp",
          axis_value: "0.08",
          L_over_N: "0.08",
          seed: "2",
          error_rate: "",
          solver_flags: "diverged:5",
        },
      ]),
    );
    const panel = buildPanel(rows, "err-vs-L");
    expect(panel.curves[0]!.points[0]!.n).toBe(2);
    expect(panel.omitted).toEqual([
      { scheme: "amp", x: 0.08, seed: 2, flag: "diverged:5" },
    ]);
  });

  it("orders schemes canonically, then alphabetically", () => {
    const rows = parseResults(
      csvOf(
        ["zeta", "ml", "proposed", "glasso"].map((s) => ({ scheme: s })),
      ),
    );
    const panel = buildPanel(rows, "err-vs-L");
    expect(panel.curves.map((c) => c.scheme)).toEqual([
      "proposed",
      "glasso",
      "ml",
      "zeta",
    ]);
  });

  it("refuses a panel whose axis was never swept", () => {
    const rows = parseResults(csvOf([{}]));
    expect(() => buildPanel(rows, "err-vs-p")).toThrow(EmptyResultsError);
    expect(() => buildPanel(rows, "err-vs-p")).toThrow(/L_over_N/);
  });

  it("refuses a panel where every row is flagged", () => {
    const rows = parseResults(
      csvOf([{ error_rate: "", solver_flags: "error:ValueError" }]),
    );
    expect(() => buildPanel(rows, "err-vs-L")).toThrow(EmptyResultsError);
  });

  it("rejects an unflagged row with a hole where the metric should be", () => {
    const rows = parseResults(csvOf([{ error_rate: "" }]));
    expect(() => buildPanel(rows, "err-vs-L")).toThrow(/corrupt/);
  });

  it("covers five error panels and two log-scale timing panels", () => {
    const ids = Object.keys(FIGURES);
    expect(ids.filter((f) => f.startsWith("err-"))).toHaveLength(5);
    const timing = ids.filter((f) => f.startsWith("time-"));
    expect(timing).toHaveLength(2);
    for (const f of timing) {
      expect(FIGURES[f as keyof typeof FIGURES].logY).toBe(true);
    }
  });
});
