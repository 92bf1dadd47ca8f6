import * as fs from "fs";
import * as path from "path";
import yargs from "yargs";
import { buildPanel, FIGURE_IDS, FigureId } from "./figures.js";
import { parseResults } from "./schema.js";
import { sidecarPath, sidecarText } from "./sidecar.js";
import { renderSvg } from "./svg.js";

export interface RenderResult {
  svgPath: string | null;
  pngPath: string | null;
  sidecar: string;
}

/** Render one figure from a results CSV.  `outPath` ending in .png asks
 *  for the raster fallback (the SVG is still written alongside); a
 *  separate `rasterPath` does the same with explicit naming. */
export async function renderFigure(opts: {
  csvPath: string;
  figure: FigureId;
  outPath: string;
  rasterPath?: string;
  logY?: boolean;
  title?: string;
}): Promise<RenderResult> {
  const text = fs.readFileSync(opts.csvPath, "utf8");
  const rows = parseResults(text);
  const panel = buildPanel(rows, opts.figure, opts.logY);
  const svg = renderSvg(panel, opts.title);

  const wantPng = opts.outPath.toLowerCase().endsWith(".png");
  const svgPath = wantPng
    ? opts.outPath.replace(/\.png$/i, ".svg")
    : opts.outPath;
  fs.mkdirSync(path.dirname(path.resolve(svgPath)), { recursive: true });
  fs.writeFileSync(svgPath, svg);

  const scPath = sidecarPath(opts.outPath);
  fs.writeFileSync(scPath, sidecarText(panel));

  let pngPath: string | null = null;
  const rasterTarget = wantPng ? opts.outPath : opts.rasterPath;
  if (rasterTarget) {
    pngPath = await rasterize(svg, rasterTarget);
  }
  return { svgPath, pngPath, sidecar: scPath };
}

async function rasterize(svg: string, target: string): Promise<string> {
  let sharp: typeof import("sharp");
  try {
    sharp = (await import("sharp")).default as never;
  } catch {
    throw new Error(
      "raster output needs the optional dependency 'sharp'; " +
        "install it (npm install sharp) or request .svg output only",
    );
  }
  await sharp(Buffer.from(svg), { density: 144 }).png().toFile(target);
  return target;
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .usage("render --csv results.csv --figure err-vs-L --out fig2a.svg")
    .option("csv", {
      type: "string",
      demandOption: true,
      describe: "sweep results CSV produced by the benchmark harness",
    })
    .option("figure", {
      type: "string",
      demandOption: true,
      choices: FIGURE_IDS,
      describe: "panel to render",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output image (.svg, or .png for the raster fallback)",
    })
    .option("raster", {
      type: "string",
      describe: "also write a PNG rasterization to this path",
    })
    .option("log-y", {
      type: "boolean",
      describe: "force the y-axis log-scale flag (timing panels default on)",
    })
    .option("title", { type: "string", describe: "override the panel title" })
    .strict()
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parse();

  const res = await renderFigure({
    csvPath: args.csv,
    figure: args.figure as FigureId,
    outPath: args.out,
    rasterPath: args.raster,
    logY: args["log-y"],
    title: args.title,
  });
  const made = [res.svgPath, res.pngPath, res.sidecar].filter(Boolean);
  console.log(`wrote ${made.join(", ")}`);
  return 0;
}

// direct invocation (node dist/render.js ...)
const isCli =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (isCli) {
  main(process.argv.slice(2))
    .then((code) => {
      process.exitCode = code;
    })
    .catch((err) => {
      console.error(`render: ${err instanceof Error ? err.message : err}`);
      process.exitCode = 1;
    });
}
