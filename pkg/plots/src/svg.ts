import { scaleLinear, scaleLog } from "d3-scale";
import { FIGURES, PanelData } from "./figures.js";

/** Bump when any visual constant changes; recorded in SVG + sidecar. */
export const STYLE_VERSION = 1;

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 150, bottom: 58, left: 72 };

const COLORS: Record<string, string> = {
  proposed: "#1f77b4",
  naive: "#ff7f0e",
  lasso: "#2ca02c",
  glasso: "#d62728",
  amp: "#9467bd",
  ml: "#8c564b",
  oracle: "#7f7f7f",
};
const FALLBACK_COLOR = "#17becf";

const MARKERS = ["circle", "square", "diamond", "triangle", "cross"] as const;

function color(scheme: string): string {
  return COLORS[scheme] ?? FALLBACK_COLOR;
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// fixed-precision coordinates keep output byte-stable across platforms
function px(v: number): string {
  const r = v.toFixed(2);
  return r === "-0.00" ? "0.00" : r;
}

function marker(kind: string, x: number, y: number, c: string): string {
  const s = 4;
  switch (kind) {
    case "square":
      return `<rect x="${px(x - s)}" y="${px(y - s)}" width="${px(2 * s)}" height="${px(2 * s)}" fill="${c}"/>`;
    case "diamond":
      return `<path d="M${px(x)} ${px(y - s - 1)}L${px(x + s + 1)} ${px(y)}L${px(x)} ${px(y + s + 1)}L${px(x - s - 1)} ${px(y)}Z" fill="${c}"/>`;
    case "triangle":
      return `<path d="M${px(x)} ${px(y - s - 1)}L${px(x + s + 1)} ${px(y + s)}L${px(x - s - 1)} ${px(y + s)}Z" fill="${c}"/>`;
    case "cross":
      return (
        `<path d="M${px(x - s)} ${px(y - s)}L${px(x + s)} ${px(y + s)}` +
        `M${px(x - s)} ${px(y + s)}L${px(x + s)} ${px(y - s)}" stroke="${c}" stroke-width="2" fill="none"/>`
      );
    default:
      return `<circle cx="${px(x)}" cy="${px(y)}" r="${s}" fill="${c}"/>`;
  }
}

/** Render one panel as a complete SVG document (deterministic string). */
export function renderSvg(panel: PanelData, title?: string): string {
  const def = FIGURES[panel.figure];
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const xs = panel.curves.flatMap((c) => c.points.map((p) => p.x));
  const ys = panel.curves.flatMap((c) =>
    c.points.flatMap((p) => [p.min, p.max]),
  );
  if (panel.logY) {
    const bad = ys.filter((v) => !(v > 0));
    if (bad.length > 0) {
      throw new Error(
        `log-scale y-axis needs strictly positive values; ` +
          `found ${bad.length} value(s) <= 0 (e.g. ${bad[0]})`,
      );
    }
  }
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  if (xLo === xHi) {
    // single sweep point: pad so the marker is not on the border
    xLo -= 0.5;
    xHi += 0.5;
  }
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (yLo === yHi) {
    if (panel.logY) {
      yLo /= 2;
      yHi *= 2;
    } else {
      yLo -= 0.5;
      yHi += 0.5;
    }
  }

  const xScale = scaleLinear()
    .domain([xLo, xHi])
    .range([MARGIN.left, MARGIN.left + innerW])
    .nice();
  const yScale = (panel.logY ? scaleLog() : scaleLinear())
    .domain([yLo, yHi])
    .range([MARGIN.top + innerH, MARGIN.top])
    .nice();

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<!-- style v${STYLE_VERSION} -->`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  // gridlines + ticks
  const xTicks = xScale.ticks(6);
  const yTicks = panel.logY ? yScale.ticks() : yScale.ticks(6);
  const xFmt = xScale.tickFormat(6);
  const yFmt = panel.logY ? yScale.tickFormat(8, "~g") : yScale.tickFormat(6);
  for (const t of yTicks) {
    const y = yScale(t);
    const label = yFmt(t);
    parts.push(
      `<line x1="${px(MARGIN.left)}" y1="${px(y)}" x2="${px(MARGIN.left + innerW)}" y2="${px(y)}" stroke="#dddddd" stroke-width="1"/>`,
    );
    if (label !== "") {
      parts.push(
        `<text x="${px(MARGIN.left - 8)}" y="${px(y + 4)}" text-anchor="end" font-size="12">${esc(label)}</text>`,
      );
    }
  }
  for (const t of xTicks) {
    const x = xScale(t);
    parts.push(
      `<line x1="${px(x)}" y1="${px(MARGIN.top + innerH)}" x2="${px(x)}" y2="${px(MARGIN.top + innerH + 5)}" stroke="#333333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(x)}" y="${px(MARGIN.top + innerH + 20)}" text-anchor="middle" font-size="12">${esc(xFmt(t))}</text>`,
    );
  }

  // axes frame
  parts.push(
    `<rect x="${px(MARGIN.left)}" y="${px(MARGIN.top)}" width="${px(innerW)}" height="${px(innerH)}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );

  // min-max band behind each multi-seed line
  for (const curve of panel.curves) {
    const spread = curve.points.filter((p) => p.n > 1 && p.min < p.max);
    if (spread.length === 0) continue;
    const upper = curve.points.map(
      (p) => `${px(xScale(p.x))},${px(yScale(p.max))}`,
    );
    const lower = [...curve.points]
      .reverse()
      .map((p) => `${px(xScale(p.x))},${px(yScale(p.min))}`);
    parts.push(
      `<polygon points="${upper.concat(lower).join(" ")}" fill="${color(curve.scheme)}" fill-opacity="0.15" stroke="none"/>`,
    );
  }

  // median lines + markers
  panel.curves.forEach((curve, i) => {
    const c = color(curve.scheme);
    const mk = MARKERS[i % MARKERS.length]!;
    const d = curve.points
      .map(
        (p, j) =>
          `${j === 0 ? "M" : "L"}${px(xScale(p.x))} ${px(yScale(p.median))}`,
      )
      .join("");
    parts.push(
      `<path d="${d}" fill="none" stroke="${c}" stroke-width="2"/>`,
    );
    for (const p of curve.points) {
      parts.push(marker(mk, xScale(p.x), yScale(p.median), c));
    }
  });

  // legend
  const lx = MARGIN.left + innerW + 12;
  panel.curves.forEach((curve, i) => {
    const ly = MARGIN.top + 10 + i * 20;
    const c = color(curve.scheme);
    parts.push(
      `<line x1="${px(lx)}" y1="${px(ly)}" x2="${px(lx + 22)}" y2="${px(ly)}" stroke="${c}" stroke-width="2"/>`,
    );
    parts.push(marker(MARKERS[i % MARKERS.length]!, lx + 11, ly, c));
    parts.push(
      `<text x="${px(lx + 28)}" y="${px(ly + 4)}" font-size="12">${esc(curve.scheme)}</text>`,
    );
  });

  // labels + title
  parts.push(
    `<text x="${px(MARGIN.left + innerW / 2)}" y="${px(HEIGHT - 16)}" text-anchor="middle" font-size="13">${esc(def.xLabel)}</text>`,
  );
  parts.push(
    `<text transform="translate(18 ${px(MARGIN.top + innerH / 2)}) rotate(-90)" text-anchor="middle" font-size="13">${esc(def.yLabel)}</text>`,
  );
  parts.push(
    `<text x="${px(MARGIN.left + innerW / 2)}" y="24" text-anchor="middle" font-size="15">${esc(title ?? panel.figure)}</text>`,
  );

  // footnote for omitted (flagged) rows
  if (panel.omitted.length > 0) {
    const shown = panel.omitted
      .slice(0, 3)
      .map((o) => `${o.scheme}@${o.x} seed ${o.seed} (${o.flag})`);
    const more =
      panel.omitted.length > 3
        ? `; and ${panel.omitted.length - 3} more`
        : "";
    parts.push(
      `<text x="${px(MARGIN.left)}" y="${px(HEIGHT - 2)}" font-size="10" fill="#666666">omitted ${panel.omitted.length} flagged row(s): ${esc(shown.join("; ") + more)}</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
