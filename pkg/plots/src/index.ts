export {
  EmptyResultsError,
  parseResults,
  REQUIRED_COLUMNS,
  SchemaError,
} from "./schema.js";
export {
  buildPanel,
  FIGURE_IDS,
  FIGURES,
  type FigureId,
  type FigureSpec,
  type PanelData,
} from "./figures.js";
export { renderSvg, STYLE_VERSION } from "./svg.js";
export {
  buildSidecar,
  SIDECAR_VERSION,
  sidecarPath,
  sidecarText,
} from "./sidecar.js";
export { main, renderFigure } from "./render.js";
