/** The five sweep families and their axis labels. */

export interface FamilySpec {
  title: string;
  xLabel: string;
}

export const FAMILIES: Record<string, FamilySpec> = {
  convergence: {
    title: "Achievable SE vs Tx-RIS distance",
    xLabel: "Tx-RIS distance d_BR (m)",
  },
  se_vs_snr: {
    title: "Achievable SE vs transmit SNR",
    xLabel: "transmit SNR (dB)",
  },
  se_vs_tau: {
    title: "Achievable SE vs normalized channel error",
    xLabel: "normalized error level tau",
  },
  se_vs_ntx: {
    title: "Achievable SE vs transmit antenna count",
    xLabel: "transmit antennas N_Tx",
  },
  se_vs_nris: {
    title: "Achievable SE vs RIS element count",
    xLabel: "RIS elements N_R",
  },
};

export const Y_LABEL = "spectral efficiency (bits/s/Hz)";

export function familySpec(name: string): FamilySpec {
  const spec = FAMILIES[name];
  if (!spec) {
    throw new Error(
      `unknown family ${JSON.stringify(name)}; expected one of ${Object.keys(FAMILIES).join(", ")}`,
    );
  }
  return spec;
}
