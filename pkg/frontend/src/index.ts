export { renderFigure, slopeAnnotation } from "./render.js";
export { FigureSpec, KIND_TO_SCHEMA, loadSummary, parseCsv } from "./schema.js";
