import { describe, expect, it } from "vitest";
import { buildPanel } from "../src/figures";
import { parseResults } from "../src/schema";
import { renderSvg } from "../src/svg";
import { csvOf } from "./helpers";

function timingCsv() {
  return csvOf(
    [0, 1, 2].flatMap((seed) =>
      [
        ["0.08", "proposed", 1e-4],
        ["0.08", "ml", 3e-2],
        ["0.14", "proposed", 2e-4],
        ["0.14", "ml", 8e-2],
      ].map(([x, scheme, t]) => ({
        scheme: String(scheme),
        axis_value: String(x),
        L_over_N: String(x),
        seed: String(seed),
        time_per_sample_s: String((t as number) * (1 + 0.1 * seed)),
      })),
    ),
  );
}

describe("svg rendering", () => {
  it("is byte-identical across repeated renders", () => {
    const rows = parseResults(timingCsv());
    const a = renderSvg(buildPanel(rows, "time-vs-L"));
    const b = renderSvg(buildPanel(rows, "time-vs-L"));
    expect(a).toBe(b);
    expect(a.startsWith("<svg ")).toBe(true);
    expect(a.trimEnd().endsWith("</svg>")).toBe(true);
  });

  it("labels decades on the log timing axis and draws a seed band", () => {
    const rows = parseResults(timingCsv());
    const svg = renderSvg(buildPanel(rows, "time-vs-L"));
    expect(svg).toContain(">0.001<");
    expect(svg).toContain(">0.01<");
    expect(svg).toContain("<polygon"); // min-max band across the 3 seeds
    expect(svg).toContain(">proposed<"); // legend entries
    expect(svg).toContain(">ml<");
    expect(svg).toContain("detection time per sample (s)");
  });

  it("draws no band for single-seed data", () => {
    const rows = parseResults(
      csvOf([
        { axis_value: "0.08", L_over_N: "0.08", error_rate: "0.2" },
        { axis_value: "0.14", L_over_N: "0.14", error_rate: "0.1" },
      ]),
    );
    const svg = renderSvg(buildPanel(rows, "err-vs-L"));
    expect(svg).not.toContain("<polygon");
  });

  it("annotates omitted rows in a footnote", () => {
    const rows = parseResults(
      csvOf([
        { scheme: "amp", error_rate: "0.2" },
        {
          scheme: "amp",
          seed: "1",
          error_rate: "",
          solver_flags: "error:ValueError",
        },
      ]),
    );
    const svg = renderSvg(buildPanel(rows, "err-vs-L"));
    expect(svg).toContain("omitted 1 flagged row(s)");
    expect(svg).toContain("error:ValueError");
  });

  it("maps larger values to higher positions on the log axis", () => {
    const rows = parseResults(timingCsv());
    const panel = buildPanel(rows, "time-vs-L");
    const svg = renderSvg(panel);
    // y pixel of the proposed curve (smaller times) must sit below ml's
    const paths = [...svg.matchAll(/<path d="M([\d.]+) ([\d.]+)L/g)];
    expect(paths.length).toBeGreaterThanOrEqual(2);
    const yProposed = Number(paths[0]![2]);
    const yMl = Number(paths[1]![2]);
    expect(yProposed).toBeGreaterThan(yMl); // SVG y grows downward
  });

  it("refuses log scale when a value is zero", () => {
    const rows = parseResults(
      csvOf([
        { scheme: "oracle", error_rate: "0.0", threshold_used: "" },
        { scheme: "proposed", error_rate: "0.1" },
      ]),
    );
    const panel = buildPanel(rows, "err-vs-L", true);
    expect(() => renderSvg(panel)).toThrow(/positive/);
  });

  it("honors a forced linear scale on a timing panel", () => {
    const rows = parseResults(timingCsv());
    const panel = buildPanel(rows, "time-vs-L", false);
    expect(panel.logY).toBe(false);
    const svg = renderSvg(panel);
    expect(svg).toContain("<svg ");
  });
});
