/** Plot layouts for the CSV files the experiment CLI's presets emit. */

import type { PlotSpec } from "./plot.js";

const DASH = "6 4";

/** Shared layout of the two three-level survival comparisons. */
function threeLevelSpec(title: string): PlotSpec {
  return {
    title,
    xColumn: "t",
    xLabel: "time (1/ω)",
    yLabel: "survival probability of level 1",
    yMin: -0.02,
    yMax: 1.02,
    curves: [
      { column: "p1_num_1", label: "ω′ = ω", color: 0 },
      { column: "p1_cf_1", color: 0, dash: DASH },
      { column: "p1_num_3", label: "ω′ = 3ω", color: 1 },
      { column: "p1_cf_3", color: 1, dash: DASH },
      { column: "p1_num_9", label: "ω′ = 9ω", color: 2 },
      { column: "p1_cf_9", color: 2, dash: DASH },
    ],
  };
}

export const PRESET_SPECS: Record<string, PlotSpec> = {
  fig1: {
    title: "Survival under repeated measurement",
    xColumn: "t",
    xLabel: "time (1/ω)",
    yLabel: "survival probability",
    yMin: -0.02,
    yMax: 1.02,
    curves: [
      { column: "p_free", label: "free evolution", color: 0 },
      { column: "p_measured", label: "5 measurements", color: 1 },
      { column: "p_interp", label: "exp(−γ_eff t)", color: 2, dash: DASH },
    ],
  },
  fig6: threeLevelSpec("Three-level survival: numerics vs closed form"),
  fig7: threeLevelSpec(
    "Dissipative three-level survival (Γ = 0.2ω, dashed: closed form)",
  ),
  qubit_protection: {
    title: "Qubit protection by a strongly driven far level",
    xColumn: "t",
    xLabel: "time (1/Ω)",
    yLabel: "population of level 2",
    yMin: -0.02,
    yMax: 1.02,
    curves: [
      { column: "p1_ideal", label: "bare Rabi target", color: 3, dash: DASH },
      { column: "p1_protected", label: "protected (ω′ = 200)", color: 0 },
      { column: "p1_unprotected", label: "unprotected (ω′ = 0)", color: 1 },
    ],
  },
};

export const PRESET_NAMES = Object.keys(PRESET_SPECS) as readonly string[];
