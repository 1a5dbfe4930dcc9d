/**
 * Plot specifications: which CSV schema feeds which figure, and the
 * per-order line-style conventions shared by all work/population figures
 * (order 0 solid blue, order 1 dashed red, order 2 dash-dotted green).
 */

export type FigureKind = "alphas" | "populations" | "work-hist" | "mixed-order-hist";

export interface PlotSpec {
  csvPath: string;
  kind: FigureKind;
  outPath: string;
  /** Optional axis-label overrides; defaults carry the natural units. */
  xLabel?: string;
  yLabel?: string;
}

export interface SeriesStyle {
  column: string;
  name: string;
  color: string;
  lineType: "solid" | "dashed" | [number, number, number, number];
}

export interface FigureSchema {
  xColumn: string;
  xLabel: string;
  yLabel: string;
  series: SeriesStyle[];
}

const DASH_DOT: [number, number, number, number] = [10, 4, 2, 4];

const ORDER_SERIES = (prefix: string): SeriesStyle[] => [
  { column: `${prefix}_n0`, name: "n = 0", color: "#1f4fd8", lineType: "solid" },
  { column: `${prefix}_n1`, name: "n = 1", color: "#d82f2f", lineType: "dashed" },
  { column: `${prefix}_n2`, name: "n = 2", color: "#1d8a3c", lineType: DASH_DOT },
];

export const SCHEMAS: Record<FigureKind, FigureSchema> = {
  alphas: {
    xColumn: "t_over_Tdrive",
    xLabel: "t / T_drive",
    yLabel: "local adiabatic parameter",
    series: [
      { column: "alpha1", name: "alpha_1", color: "#1f4fd8", lineType: "solid" },
      { column: "alpha2", name: "alpha_2", color: "#d82f2f", lineType: "dashed" },
    ],
  },
  populations: {
    xColumn: "t_over_Tdrive",
    xLabel: "t / T_drive",
    yLabel: "rho_ee",
    series: ORDER_SERIES("rho_ee"),
  },
  "work-hist": {
    xColumn: "W_over_hw0",
    xLabel: "W / (hbar omega_0)",
    yLabel: "probability density d_n(W)",
    series: ORDER_SERIES("density"),
  },
  "mixed-order-hist": {
    xColumn: "W_over_hw0",
    xLabel: "W / (hbar omega_0)",
    yLabel: "probability density d'_2(W)",
    series: ORDER_SERIES("density"),
  },
};

export const KINDS = Object.keys(SCHEMAS) as FigureKind[];
