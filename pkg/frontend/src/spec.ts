/** Figure specifications: which aggregate columns each preset plots. */

export interface SeriesSpec {
  yColumn: string;
  seColumn?: string;
  /** legend label; #g expands to the group value */
  label: string;
}

export interface FigureSpec {
  preset: string;
  title: string;
  xColumn: string;
  xLabel: string;
  yLabel: string;
  /** one polyline per distinct value of this column (omit for single group) */
  groupColumn?: string;
  series: SeriesSpec[];
}

export const FIGURE_SPECS: Record<string, FigureSpec> = {
  fig3: {
    preset: "fig3",
    title: "Sum secrecy rate vs transmit power, hostile surface sizes",
    xColumn: "P_T_dBW",
    xLabel: "transmit power (dBW)",
    yLabel: "sum secrecy rate (b/s/Hz)",
    groupColumn: "N_M",
    series: [{ yColumn: "mean_S_R_sum", seColumn: "se_S_R_sum", label: "N_M = #g" }],
  },
  fig4: {
    preset: "fig4",
    title: "Sum secrecy rate vs transmit power, legitimate surface sizes",
    xColumn: "P_T_dBW",
    xLabel: "transmit power (dBW)",
    yLabel: "sum secrecy rate (b/s/Hz)",
    groupColumn: "N_L",
    series: [{ yColumn: "mean_S_R_sum", seColumn: "se_S_R_sum", label: "N_L = #g" }],
  },
  fig5: {
    preset: "fig5",
    title: "Sum secrecy rate vs legitimate surface size",
    xColumn: "grid_value",
    xLabel: "legitimate surface elements N_L",
    yLabel: "sum secrecy rate (b/s/Hz)",
    series: [{ yColumn: "mean_S_R_sum", seColumn: "se_S_R_sum", label: "S_R" }],
  },
  fig6: {
    preset: "fig6",
    title: "Sum secrecy rate vs hostile surface size",
    xColumn: "grid_value",
    xLabel: "hostile surface elements N_M",
    yLabel: "sum secrecy rate (b/s/Hz)",
    groupColumn: "P_T_dBW",
    series: [{ yColumn: "mean_S_R_sum", seColumn: "se_S_R_sum", label: "P_T = #g dBW" }],
  },
  fig7: {
    preset: "fig7",
    title: "Sensing SINR vs eavesdropper horizontal distance",
    xColumn: "grid_value",
    xLabel: "E-UAV horizontal distance (m)",
    yLabel: "sensing SINR (dB)",
    series: [
      { yColumn: "mean_gamma_L_dB", seColumn: "se_gamma_L_dB", label: "legitimate target" },
      { yColumn: "mean_gamma_E_dB", seColumn: "se_gamma_E_dB", label: "eavesdropper target" },
    ],
  },
  fig8: {
    preset: "fig8",
    title: "Root CRB of the eavesdropper target vs horizontal distance",
    xColumn: "grid_value",
    xLabel: "E-UAV horizontal distance (m)",
    yLabel: "root CRB (deg)",
    groupColumn: "P_T_dBW",
    series: [
      { yColumn: "mean_rootCRB_comb_deg", seColumn: "se_rootCRB_comb_deg", label: "P_T = #g dBW" },
    ],
  },
};

export function figureSpec(preset: string): FigureSpec {
  const spec = FIGURE_SPECS[preset];
  if (!spec) {
    throw new Error(
      `unknown preset '${preset}'; available: ${Object.keys(FIGURE_SPECS).join(", ")}`,
    );
  }
  return spec;
}
