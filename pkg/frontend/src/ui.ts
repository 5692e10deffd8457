// Presentation helpers. Everything that turns payloads into visible text
// lives here so tests can pin the round-trip rule: rendered numbers are the
// payload numbers, unmodified.

import { PairPayload } from "./api.js";
import { fmt } from "./charts.js";

export type Side = 0 | 1;

export function sideLabel(pair: PairPayload, side: Side): string {
  const label = side === 0 ? pair.p_label : pair.q_label;
  if (label !== undefined && label !== "") return label;
  return `item ${side === 0 ? pair.p_index : pair.q_index}`;
}

export function sideCoords(pair: PairPayload, side: Side): string {
  const point = side === 0 ? pair.p : pair.q;
  return `(${point.map(fmt).join(", ")})`;
}

/** Labels that are http(s) URLs to common raster formats render as images. */
export function imageUrl(pair: PairPayload, side: Side): string | null {
  const label = side === 0 ? pair.p_label : pair.q_label;
  if (label === undefined) return null;
  if (/^https?:\/\/\S+\.(png|jpe?g|gif|webp|svg)$/i.test(label)) return label;
  return null;
}

export function estimateText(estimate: number[] | null): string {
  if (estimate === null) return "no answers yet";
  return `(${estimate.map(fmt).join(", ")})`;
}

export function progressText(answered: number): string {
  return answered === 1 ? "1 answer" : `${answered} answers`;
}
