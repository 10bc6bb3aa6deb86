export {
  DensityTable,
  ObservableSeries,
  ObservablesTable,
  parseDensity,
  parseObservables,
  readDensity,
  readManifest,
  readObservables,
  RunManifest,
  SchemaError,
} from "./csv.js";
export { sizeColor, viridis } from "./color.js";
export { extent, linearScale, niceTicks, Scale } from "./scale.js";
export {
  collapsedTimes,
  DEFAULT_GEOMETRY,
  PanelGeometry,
  PanelOptions,
  renderCollapse,
  renderCurves,
  renderHeatmap,
  RunData,
} from "./panels.js";
export { loadRun, PanelKind, PlotSpec, render, renderToFile, validateSpec } from "./spec.js";
export { main, parseArgs } from "./cli.js";
