export { CsvParseError, column, parseCsv, type Table } from "./csv.js";
export {
  ColumnError,
  niceTicks,
  renderPlot,
  type CurveSpec,
  type PlotSpec,
  type Styles,
} from "./plot.js";
export { PRESET_NAMES, PRESET_SPECS } from "./presets.js";
