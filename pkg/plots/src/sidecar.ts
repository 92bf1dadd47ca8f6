import { PanelData } from "./figures.js";
import { STYLE_VERSION } from "./svg.js";

export const SIDECAR_VERSION = 1;

/** The machine-readable record of exactly what a figure shows.  Written
 *  next to every image so plotted values can be diffed against the CSV
 *  without scraping the SVG. */
export interface Sidecar {
  sidecar_version: number;
  style_version: number;
  figure: string;
  x_column: string;
  y_column: string;
  log_y: boolean;
  curves: PanelData["curves"];
  omitted: PanelData["omitted"];
}

export function buildSidecar(panel: PanelData): Sidecar {
  return {
    sidecar_version: SIDECAR_VERSION,
    style_version: STYLE_VERSION,
    figure: panel.figure,
    x_column: panel.xColumn,
    y_column: panel.yColumn,
    log_y: panel.logY,
    curves: panel.curves,
    omitted: panel.omitted,
  };
}

/** image path -> its sidecar path (foo.svg -> foo.points.json). */
export function sidecarPath(outPath: string): string {
  return outPath.replace(/\.[A-Za-z0-9]+$/, "") + ".points.json";
}

export function sidecarText(panel: PanelData): string {
  // default JSON number formatting is shortest-round-trip, so values
  // survive write -> parse exactly
  return JSON.stringify(buildSidecar(panel), null, 2) + "\n";
}
