/**
 * Server-side SVG rendering of the figure analogues.
 *
 * No physics is computed here: the CSV columns documented by the simulator
 * are plotted verbatim with the per-order line-style conventions from the
 * figure schemas.  Rendering is deterministic in (CSV bytes, spec).
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import * as echarts from "echarts";

import { loadCsv, validateSchema } from "./csv.js";
import { SCHEMAS, type PlotSpec } from "./spec.js";

const WIDTH = 820;
const HEIGHT = 520;

/**
 * The SVG backend numbers CSS classes with process-global counters, so two
 * renders of the same spec differ in class names only.  Renumber them in
 * order of first appearance to make the output a pure function of the input.
 */
function normalizeSvg(svg: string): string {
  const seen = new Map<string, string>();
  return svg.replace(/zr\d+-(cls-|c)\d+/g, (match, kind) => {
    let name = seen.get(match);
    if (name === undefined) {
      name = `${kind === "cls-" ? "zr-cls-" : "zr-clip-"}${seen.size}`;
      seen.set(match, name);
    }
    return name;
  });
}

export function renderToString(spec: PlotSpec): string {
  const schema = SCHEMAS[spec.kind];
  if (schema === undefined) {
    throw new Error(`unknown figure kind '${spec.kind}'`);
  }
  const table = loadCsv(spec.csvPath);
  validateSchema(table, schema, spec.csvPath);

  const x = table.data.get(schema.xColumn)!;
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: WIDTH,
    height: HEIGHT,
  });
  try {
    chart.setOption({
      animation: false,
      backgroundColor: "#ffffff",
      legend: { top: 8, textStyle: { fontSize: 14 } },
      grid: { left: 70, right: 24, top: 48, bottom: 56 },
      xAxis: {
        type: "value",
        name: spec.xLabel ?? schema.xLabel,
        nameLocation: "middle",
        nameGap: 32,
        min: "dataMin",
        max: "dataMax",
      },
      yAxis: {
        type: "value",
        name: spec.yLabel ?? schema.yLabel,
        nameLocation: "middle",
        nameGap: 48,
      },
      series: schema.series.map((s) => ({
        name: s.name,
        type: "line",
        showSymbol: false,
        data: x.map((xi, i) => [xi, table.data.get(s.column)![i]]),
        lineStyle: { color: s.color, width: 2, type: s.lineType },
        itemStyle: { color: s.color },
      })),
    });
    return normalizeSvg(chart.renderToSVGString());
  } finally {
    chart.dispose();
  }
}

export function render(spec: PlotSpec): string {
  const svg = renderToString(spec);
  mkdirSync(dirname(spec.outPath), { recursive: true });
  writeFileSync(spec.outPath, svg);
  return spec.outPath;
}
