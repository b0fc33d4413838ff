/** Deterministic SVG line-plot renderer: table + spec + styles -> markup. */

import { column, type Table } from "./csv.js";

export interface CurveSpec {
  /** CSV column holding the y values. */
  column: string;
  /** Legend text; curves without a label stay out of the legend. */
  label?: string;
  /** Index into the style palette. */
  color: number;
  /** SVG dash pattern, e.g. "6 4"; solid when omitted. */
  dash?: string;
}

export interface PlotSpec {
  title: string;
  /** CSV column holding the x values. */
  xColumn: string;
  xLabel: string;
  yLabel: string;
  curves: CurveSpec[];
  /** Fixed y window; derived from the data with 4% padding when omitted. */
  yMin?: number;
  yMax?: number;
}

export interface Styles {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  background: string;
  axisColor: string;
  gridColor: string;
  textColor: string;
  fontFamily: string;
  fontSize: number;
  titleSize: number;
  tickTarget: number;
  curveWidth: number;
  palette: string[];
}

/** Raised when the spec asks for a column the table does not have. */
export class ColumnError extends Error {
  constructor(name: string, available: string[]) {
    super(`csv has no column "${name}" (available: ${available.join(", ")})`);
    this.name = "ColumnError";
  }
}

/** Fixed-precision coordinate so output never depends on locale/rounding. */
function coord(value: number): string {
  const text = value.toFixed(2);
  return text === "-0.00" ? "0.00" : text;
}

/** Compact tick label: enough digits to tell ticks apart, no noise. */
function tickLabel(value: number): string {
  if (value === 0) return "0";
  const text = value.toPrecision(4);
  return String(Number(text));
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Round tick positions: steps of 1, 2, or 5 times a power of ten. */
export function niceTicks(min: number, max: number, target: number): number[] {
  if (!(max > min)) {
    return [min];
  }
  const rawStep = (max - min) / Math.max(1, target);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = power * 10;
  for (const mult of [1, 2, 5]) {
    if (mult * power >= rawStep) {
      step = mult * power;
      break;
    }
  }
  const ticks: number[] = [];
  const firstIndex = Math.ceil(min / step - 1e-9);
  const lastIndex = Math.floor(max / step + 1e-9);
  for (let k = firstIndex; k <= lastIndex; k += 1) {
    // Multiply by index and re-round so ticks carry no accumulated error.
    ticks.push(k === 0 ? 0 : Number((k * step).toPrecision(12)));
  }
  return ticks;
}

interface Extent {
  min: number;
  max: number;
}

function dataExtent(values: number[][]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const series of values) {
    for (const v of series) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  return { min, max };
}

/**
 * Render one table as a standalone SVG document string.
 *
 * Output is fully deterministic for a given (table, spec, styles)
 * triple: coordinates are emitted with fixed precision and all layout
 * is computed from the inputs, so golden-file comparison is exact.
 */
export function renderPlot(table: Table, spec: PlotSpec, styles: Styles): string {
  for (const name of [spec.xColumn, ...spec.curves.map((c) => c.column)]) {
    if (!table.header.includes(name)) {
      throw new ColumnError(name, table.header);
    }
  }

  const xs = column(table, spec.xColumn);
  const series = spec.curves.map((c) => column(table, c.column));
  const xExtent = dataExtent([xs]);
  let yExtent: Extent;
  if (spec.yMin !== undefined && spec.yMax !== undefined) {
    yExtent = { min: spec.yMin, max: spec.yMax };
  } else {
    const raw = dataExtent(series);
    const pad = 0.04 * (raw.max - raw.min);
    yExtent = { min: raw.min - pad, max: raw.max + pad };
  }

  const { margin } = styles;
  const plotW = styles.width - margin.left - margin.right;
  const plotH = styles.height - margin.top - margin.bottom;
  const sx = (x: number): number =>
    margin.left + ((x - xExtent.min) / (xExtent.max - xExtent.min)) * plotW;
  const sy = (y: number): number =>
    margin.top + plotH - ((y - yExtent.min) / (yExtent.max - yExtent.min)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${styles.width}" ` +
      `height="${styles.height}" viewBox="0 0 ${styles.width} ${styles.height}">`,
  );
  parts.push(
    `<rect width="${styles.width}" height="${styles.height}" ` +
      `fill="${styles.background}"/>`,
  );

  const font = `font-family="${styles.fontFamily}" font-size="${styles.fontSize}" ` +
    `fill="${styles.textColor}"`;

  // Gridlines and tick labels.
  const xTicks = niceTicks(xExtent.min, xExtent.max, styles.tickTarget);
  const yTicks = niceTicks(yExtent.min, yExtent.max, styles.tickTarget);
  for (const t of xTicks) {
    const x = coord(sx(t));
    parts.push(
      `<line x1="${x}" y1="${coord(margin.top)}" x2="${x}" ` +
        `y2="${coord(margin.top + plotH)}" stroke="${styles.gridColor}"/>`,
    );
    parts.push(
      `<text x="${x}" y="${coord(margin.top + plotH + 18)}" ${font} ` +
        `text-anchor="middle">${tickLabel(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const y = coord(sy(t));
    parts.push(
      `<line x1="${coord(margin.left)}" y1="${y}" ` +
        `x2="${coord(margin.left + plotW)}" y2="${y}" stroke="${styles.gridColor}"/>`,
    );
    parts.push(
      `<text x="${coord(margin.left - 8)}" y="${coord(sy(t) + 4)}" ${font} ` +
        `text-anchor="end">${tickLabel(t)}</text>`,
    );
  }

  // Axes frame.
  parts.push(
    `<rect x="${coord(margin.left)}" y="${coord(margin.top)}" ` +
      `width="${coord(plotW)}" height="${coord(plotH)}" fill="none" ` +
      `stroke="${styles.axisColor}" stroke-width="1"/>`,
  );

  // Curves.
  for (let i = 0; i < spec.curves.length; i += 1) {
    const curve = spec.curves[i];
    const color = styles.palette[curve.color % styles.palette.length];
    const points = xs
      .map((x, k) => `${coord(sx(x))},${coord(sy(series[i][k]))}`)
      .join(" ");
    const dash = curve.dash ? ` stroke-dasharray="${curve.dash}"` : "";
    parts.push(
      `<polyline fill="none" stroke="${color}" ` +
        `stroke-width="${styles.curveWidth}"${dash} points="${points}"/>`,
    );
  }

  // Title and axis labels.
  parts.push(
    `<text x="${coord(styles.width / 2)}" y="${coord(margin.top - 18)}" ` +
      `font-family="${styles.fontFamily}" font-size="${styles.titleSize}" ` +
      `fill="${styles.textColor}" text-anchor="middle" font-weight="bold">` +
      `${escapeXml(spec.title)}</text>`,
  );
  parts.push(
    `<text x="${coord(margin.left + plotW / 2)}" ` +
      `y="${coord(styles.height - 14)}" ${font} text-anchor="middle">` +
      `${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${coord(margin.top + plotH / 2)}" ${font} ` +
      `text-anchor="middle" transform="rotate(-90 18 ` +
      `${coord(margin.top + plotH / 2)})">${escapeXml(spec.yLabel)}</text>`,
  );

  // Legend: one entry per labeled curve, top-right inside the frame.
  const entries = spec.curves.filter((c) => c.label !== undefined);
  if (entries.length > 0) {
    const lineH = styles.fontSize + 7;
    const boxW =
      36 + Math.max(...entries.map((c) => (c.label as string).length)) *
        styles.fontSize * 0.62;
    const boxH = entries.length * lineH + 10;
    const boxX = margin.left + plotW - boxW - 10;
    const boxY = margin.top + 10;
    parts.push(
      `<rect x="${coord(boxX)}" y="${coord(boxY)}" width="${coord(boxW)}" ` +
        `height="${coord(boxH)}" fill="${styles.background}" ` +
        `fill-opacity="0.9" stroke="${styles.gridColor}"/>`,
    );
    entries.forEach((curve, row) => {
      const cy = boxY + 10 + row * lineH + (lineH - 7) / 2;
      const color = styles.palette[curve.color % styles.palette.length];
      const dash = curve.dash ? ` stroke-dasharray="${curve.dash}"` : "";
      parts.push(
        `<line x1="${coord(boxX + 8)}" y1="${coord(cy)}" ` +
          `x2="${coord(boxX + 30)}" y2="${coord(cy)}" stroke="${color}" ` +
          `stroke-width="${styles.curveWidth}"${dash}/>`,
      );
      parts.push(
        `<text x="${coord(boxX + 36)}" y="${coord(cy + 4)}" ${font}>` +
          `${escapeXml(curve.label as string)}</text>`,
      );
    });
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
