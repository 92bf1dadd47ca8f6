import { EmptyResultsError, numeric, RawRow } from "./schema.js";

/** Sweep axes the harness can produce; doubles as the x column name. */
export type AxisColumn = "L_over_N" | "p" | "M" | "p1_over_p2" | "G";

export type MetricColumn = "error_rate" | "time_per_sample_s";

export interface FigureDef {
  x: AxisColumn;
  y: MetricColumn;
  logY: boolean;
  xLabel: string;
  yLabel: string;
}

/** Five error-rate panels (one per sweep axis) and two timing panels. */
export const FIGURES = {
  "err-vs-L": {
    x: "L_over_N",
    y: "error_rate",
    logY: false,
    xLabel: "undersampling ratio L/N",
    yLabel: "error rate",
  },
  "err-vs-p": {
    x: "p",
    y: "error_rate",
    logY: false,
    xLabel: "mean activity probability p",
    yLabel: "error rate",
  },
  "err-vs-M": {
    x: "M",
    y: "error_rate",
    logY: false,
    xLabel: "antennas M",
    yLabel: "error rate",
  },
  "err-vs-ratio": {
    x: "p1_over_p2",
    y: "error_rate",
    logY: false,
    xLabel: "group probability ratio p1/p2",
    yLabel: "error rate",
  },
  "err-vs-G": {
    x: "G",
    y: "error_rate",
    logY: false,
    xLabel: "groups G",
    yLabel: "error rate",
  },
  "time-vs-L": {
    x: "L_over_N",
    y: "time_per_sample_s",
    logY: true,
    xLabel: "undersampling ratio L/N",
    yLabel: "detection time per sample (s)",
  },
  "time-vs-M": {
    x: "M",
    y: "time_per_sample_s",
    logY: true,
    xLabel: "antennas M",
    yLabel: "detection time per sample (s)",
  },
} as const satisfies Record<string, FigureDef>;

export type FigureId = keyof typeof FIGURES;

export const FIGURE_IDS = Object.keys(FIGURES) as FigureId[];

/** Render request: which CSV, which panel, where to put the image. */
export interface FigureSpec {
  csvPath: string;
  figure: FigureId;
  outPath: string;
  logY?: boolean; // overrides the panel default when set
}

export interface PanelPoint {
  x: number;
  median: number;
  min: number;
  max: number;
  n: number; // seeds aggregated into this point
}

export interface PanelCurve {
  scheme: string;
  points: PanelPoint[];
}

export interface OmittedRow {
  scheme: string;
  x: number;
  seed: number;
  flag: string;
}

/** Everything a renderer needs; also the sidecar payload. */
export interface PanelData {
  figure: FigureId;
  xColumn: AxisColumn;
  yColumn: MetricColumn;
  logY: boolean;
  curves: PanelCurve[];
  omitted: OmittedRow[];
}

// legend / draw order; unknown schemes go after these, alphabetically
const SCHEME_ORDER = [
  "proposed",
  "naive",
  "lasso",
  "glasso",
  "amp",
  "ml",
  "oracle",
];

function schemeRank(s: string): [number, string] {
  const i = SCHEME_ORDER.indexOf(s);
  return [i === -1 ? SCHEME_ORDER.length : i, s];
}

function median(sorted: number[]): number {
  const n = sorted.length;
  const mid = n >> 1;
  const hi = sorted[mid]!;
  return n % 2 === 1 ? hi : (sorted[mid - 1]! + hi) / 2;
}

/** Aggregate CSV rows into one panel: group by (scheme, x), median line
 *  with min-max spread across seeds.  Rows carrying solver flags are
 *  omitted from the aggregation and reported for the footnote. */
export function buildPanel(
  rows: RawRow[],
  figure: FigureId,
  logY?: boolean,
): PanelData {
  const def: FigureDef = FIGURES[figure];
  const swept = rows.filter((r) => r["axis"] === def.x);
  if (swept.length === 0) {
    const seen = [...new Set(rows.map((r) => r["axis"]))].sort().join(", ");
    throw new EmptyResultsError(
      `no rows swept along ${def.x} (axes present: ${seen || "none"})`,
    );
  }

  const omitted: OmittedRow[] = [];
  // group key is the raw CSV string so equal cells can never drift apart
  const bySchemeX = new Map<string, Map<string, number[]>>();
  for (const row of swept) {
    const scheme = row["scheme"] ?? "";
    const xRaw = row[def.x] ?? "";
    const x = Number(xRaw);
    const flag = row["solver_flags"] ?? "";
    if (flag !== "") {
      omitted.push({
        scheme,
        x,
        seed: numeric(row, "seed") ?? -1,
        flag,
      });
      continue;
    }
    const y = numeric(row, def.y);
    if (y === null) {
      throw new Error(
        `row for ${scheme} at ${def.x}=${xRaw} has no ${def.y} value ` +
          "and no solver flag; refusing to plot a corrupt results file",
      );
    }
    let perX = bySchemeX.get(scheme);
    if (!perX) bySchemeX.set(scheme, (perX = new Map()));
    let vals = perX.get(xRaw);
    if (!vals) perX.set(xRaw, (vals = []));
    vals.push(y);
  }

  if (bySchemeX.size === 0) {
    throw new EmptyResultsError(
      `every row swept along ${def.x} carries a solver flag`,
    );
  }

  const schemes = [...bySchemeX.keys()].sort((a, b) => {
    const [ra, na] = schemeRank(a);
    const [rb, nb] = schemeRank(b);
    return ra - rb || (na < nb ? -1 : na > nb ? 1 : 0);
  });
  const curves: PanelCurve[] = schemes.map((scheme) => {
    const perX = bySchemeX.get(scheme)!;
    const points = [...perX.entries()]
      .map(([xRaw, vals]) => {
        const sorted = [...vals].sort((a, b) => a - b);
        return {
          x: Number(xRaw),
          median: median(sorted),
          min: sorted[0]!,
          max: sorted[sorted.length - 1]!,
          n: sorted.length,
        };
      })
      .sort((a, b) => a.x - b.x);
    return { scheme, points };
  });

  omitted.sort(
    (a, b) =>
      schemeRank(a.scheme)[0] - schemeRank(b.scheme)[0] ||
      a.x - b.x ||
      a.seed - b.seed,
  );

  return {
    figure,
    xColumn: def.x,
    yColumn: def.y,
    logY: logY ?? def.logY,
    curves,
    omitted,
  };
}
