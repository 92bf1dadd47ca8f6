import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";
import { main } from "../src/render";
import { csvOf } from "./helpers";

let sharpOk = true;
try {
  await import("sharp");
} catch {
  sharpOk = false;
}

function tmpCsv(text: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "jssr-cli-"));
  const p = path.join(dir, "results.csv");
  fs.writeFileSync(p, text);
  return p;
}

const BASIC = csvOf([
  { axis_value: "0.08", L_over_N: "0.08", error_rate: "0.2" },
  { axis_value: "0.14", L_over_N: "0.14", error_rate: "0.1" },
]);

describe("render CLI", () => {
  it("writes the svg and its sidecar", async () => {
    const csv = tmpCsv(BASIC);
    const out = path.join(path.dirname(csv), "fig.svg");
    const code = await main([
      "--csv", csv, "--figure", "err-vs-L", "--out", out,
    ]);
    expect(code).toBe(0);
    expect(fs.readFileSync(out, "utf8")).toContain("</svg>");
    const sidecar = JSON.parse(
      fs.readFileSync(path.join(path.dirname(csv), "fig.points.json"), "utf8"),
    );
    expect(sidecar.curves[0].points).toHaveLength(2);
  });

  it.skipIf(!sharpOk)("rasterizes when asked for a .png", async () => {
    const csv = tmpCsv(BASIC);
    const out = path.join(path.dirname(csv), "fig.png");
    const code = await main([
      "--csv", csv, "--figure", "err-vs-L", "--out", out,
    ]);
    expect(code).toBe(0);
    const png = fs.readFileSync(out);
    expect(png.subarray(1, 4).toString()).toBe("PNG");
    // vector original is kept next to the raster
    expect(fs.existsSync(out.replace(/\.png$/, ".svg"))).toBe(true);
  });

  it("fails loudly on a CSV with missing columns", async () => {
    const csv = tmpCsv("scheme,axis\nproposed,L_over_N\n");
    await expect(
      main(["--csv", csv, "--figure", "err-vs-L", "--out", "/tmp/x.svg"]),
    ).rejects.toThrow(/missing required column/);
  });

  it("rejects unknown figure names", async () => {
    const csv = tmpCsv(BASIC);
    await expect(
      main(["--csv", csv, "--figure", "err-vs-Q", "--out", "/tmp/x.svg"]),
    ).rejects.toThrow();
  });

  it("propagates the no-data error for an unswept axis", async () => {
    const csv = tmpCsv(BASIC);
    await expect(
      main(["--csv", csv, "--figure", "err-vs-G", "--out", "/tmp/x.svg"]),
    ).rejects.toThrow(/no rows swept along G/);
  });
});
