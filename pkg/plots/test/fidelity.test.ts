import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { beforeAll, describe, expect, it } from "vitest";
import { FigureId, FIGURES } from "../src/figures";
import { renderFigure } from "../src/render";

// Sidecar fidelity: every plotted number must be re-derivable from the
// CSV alone.  The recomputation below shares no code with the library
// (hand-rolled CSV split, separate median), so agreement is meaningful.

const TESTDATA = path.join(__dirname, "..", "testdata");

interface Expected {
  curves: Array<{
    scheme: string;
    points: Array<{ x: number; median: number; min: number; max: number; n: number }>;
  }>;
  omittedCount: number;
}

function recompute(csvPath: string, figure: FigureId): Expected {
  const def = FIGURES[figure];
  const lines = fs.readFileSync(csvPath, "utf8").trim().split("\n");
  const header = lines[0]!.split(",");
  const col = (name: string) => {
    const i = header.indexOf(name);
    if (i === -1) throw new Error(`no column ${name}`);
    return i;
  };
  const iScheme = col("scheme");
  const iAxis = col("axis");
  const iX = col(def.x);
  const iY = col(def.y);
  const iFlags = col("solver_flags");

  const acc = new Map<string, Map<string, number[]>>();
  let omitted = 0;
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells[iAxis] !== def.x) continue;
    if (cells[iFlags] !== "") {
      omitted += 1;
      continue;
    }
    const scheme = cells[iScheme]!;
    const xRaw = cells[iX]!;
    if (!acc.has(scheme)) acc.set(scheme, new Map());
    const perX = acc.get(scheme)!;
    if (!perX.has(xRaw)) perX.set(xRaw, []);
    perX.get(xRaw)!.push(Number(cells[iY]));
  }

  const order = ["proposed", "naive", "lasso", "glasso", "amp", "ml", "oracle"];
  const schemes = [...acc.keys()].sort((a, b) => {
    const ra = order.indexOf(a) === -1 ? order.length : order.indexOf(a);
    const rb = order.indexOf(b) === -1 ? order.length : order.indexOf(b);
    return ra - rb || a.localeCompare(b);
  });
  const curves = schemes.map((scheme) => ({
    scheme,
    points: [...acc.get(scheme)!.entries()]
      .map(([xRaw, vals]) => {
        const v = [...vals].sort((p, q) => p - q);
        const m = v.length;
        const med =
          m % 2 === 1 ? v[(m - 1) / 2]! : (v[m / 2 - 1]! + v[m / 2]!) / 2;
        return { x: Number(xRaw), median: med, min: v[0]!, max: v[m - 1]!, n: m };
      })
      .sort((p, q) => p.x - q.x),
  }));
  return { curves, omittedCount: omitted };
}

async function renderAndCheck(csvPath: string, figure: FigureId) {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "jssr-plots-"));
  const out = path.join(dir, `${figure}.svg`);
  const res = await renderFigure({ csvPath, figure, outPath: out });
  expect(fs.existsSync(out)).toBe(true);
  const sidecar = JSON.parse(fs.readFileSync(res.sidecar, "utf8"));
  const want = recompute(csvPath, figure);
  expect(sidecar.curves).toEqual(want.curves);
  expect(sidecar.omitted.length).toBe(want.omittedCount);
  expect(sidecar.figure).toBe(figure);
  expect(sidecar.x_column).toBe(FIGURES[figure].x);
  return sidecar;
}

// figure -> fixture produced by the sweep harness (testdata/regen.sh)
const FIXTURES: Record<FigureId, string> = {
  "err-vs-L": "toy_L.csv",
  "err-vs-p": "toy_p.csv",
  "err-vs-M": "toy_M.csv",
  "err-vs-ratio": "toy_ratio.csv",
  "err-vs-G": "toy_G.csv",
  "time-vs-L": "toy_L.csv",
  "time-vs-M": "toy_M.csv",
};

describe("sidecar matches CSV-derived values on harness output", () => {
  beforeAll(() => {
    for (const f of new Set(Object.values(FIXTURES))) {
      expect(fs.existsSync(path.join(TESTDATA, f)), `${f} missing`).toBe(true);
    }
  });

  for (const [figure, fixture] of Object.entries(FIXTURES)) {
    it(`${figure} from ${fixture}`, async () => {
      const sidecar = await renderAndCheck(
        path.join(TESTDATA, fixture),
        figure as FigureId,
      );
      // three seeds in every fixture: spreads are real, not degenerate
      const pts = sidecar.curves.flatMap((c: { points: unknown[] }) => c.points);
      expect(pts.length).toBeGreaterThan(0);
      for (const p of pts as Array<{ n: number }>) expect(p.n).toBe(3);
    });
  }
});

describe("desk-scale results render unmodified", () => {
  const deskCsv = path.join(TESTDATA, "desk_L.csv");

  it("error panel", async () => {
    const sidecar = await renderAndCheck(deskCsv, "err-vs-L");
    const schemes = sidecar.curves.map((c: { scheme: string }) => c.scheme);
    expect(schemes).toContain("proposed");
  });

  it("timing panel (log y)", async () => {
    const sidecar = await renderAndCheck(deskCsv, "time-vs-L");
    expect(sidecar.log_y).toBe(true);
  });
});
