// Client-side mirror of the server's CRI arithmetic. It only feeds the live
// preview in the scoring form; the server's value is authoritative and
// replaces the preview after every submit.

export type Level = "Low" | "Medium" | "High";

export interface Preview {
  likelihood: number;
  impact: number;
  cri: number;
  level: Level;
}

export const FACTOR_GROUPS = [
  { key: "threat_agent", label: "Threat agent" },
  { key: "vulnerability", label: "Vulnerability" },
  { key: "technical_impact", label: "Technical impact" },
  { key: "business_impact", label: "Business impact" },
] as const;

export type GroupKey = (typeof FACTOR_GROUPS)[number]["key"];

export const FACTOR_MIN = 0;
export const FACTOR_MAX = 9;

// Five equal bands over [0, 9]; a value on an edge belongs to the upper band.
const BAND_EDGES = [1.8, 3.6, 5.4, 7.2];

export function quantizeBand(value: number): number {
  let band = 1;
  for (const edge of BAND_EDGES) {
    if (value >= edge) band += 1;
  }
  return band;
}

export function criLevel(cri: number): Level {
  if (cri <= 5) return "Low";
  if (cri <= 12) return "Medium";
  return "High";
}

function mean(values: number[]): number {
  let total = 0;
  for (const v of values) total += v;
  return total / values.length;
}

export function previewFromFactors(
  threatAgent: number[],
  vulnerability: number[],
  technicalImpact: number[],
  businessImpact: number[],
): Preview {
  const likelihood = quantizeBand(mean([...threatAgent, ...vulnerability]));
  const impact = quantizeBand(mean([...technicalImpact, ...businessImpact]));
  const cri = likelihood * impact;
  return { likelihood, impact, cri, level: criLevel(cri) };
}

export function previewFromBands(likelihood: number, impact: number): Preview {
  const cri = likelihood * impact;
  return { likelihood, impact, cri, level: criLevel(cri) };
}

export const STRIDE_CATEGORIES = [
  { value: "SpoofingIdentity", label: "Spoofing identity" },
  { value: "Tampering", label: "Tampering" },
  { value: "Repudiation", label: "Repudiation" },
  { value: "InformationDisclosure", label: "Information disclosure" },
  { value: "DenialOfService", label: "Denial of service" },
  { value: "ElevationOfPrivilege", label: "Elevation of privilege" },
] as const;
