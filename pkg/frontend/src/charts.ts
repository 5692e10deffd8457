// Inline-SVG chart builders. Pure string producers so they test without a DOM.

const XMLNS = "http://www.w3.org/2000/svg";

/** Shortest decimal that reparses to the same double. */
export function fmt(x: number): string {
  return String(x);
}

function rescale(
  values: number[],
  lo: number,
  hi: number,
): (v: number) => number {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const span = max - min;
  return (v) => lo + ((v - min) / span) * (hi - lo);
}

/**
 * Estimate trajectory for 2-d embeddings: a polyline through successive
 * estimates with the latest point emphasised.
 */
export function scatterSvg(points: number[][], width = 260, height = 260): string {
  if (points.length === 0) {
    return `<svg xmlns="${XMLNS}" width="${width}" height="${height}" class="chart empty"></svg>`;
  }
  const pad = 12;
  const sx = rescale(points.map((p) => p[0] ?? 0), pad, width - pad);
  const sy = rescale(points.map((p) => p[1] ?? 0), height - pad, pad);
  const coords = points.map((p) => [sx(p[0] ?? 0), sy(p[1] ?? 0)] as const);
  const path = coords.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
  const dots = coords
    .map(([x, y], i) => {
      const last = i === points.length - 1;
      const r = last ? 5 : 2.5;
      const cls = last ? "dot latest" : "dot";
      return `<circle class="${cls}" cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}"/>`;
    })
    .join("");
  return (
    `<svg xmlns="${XMLNS}" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" class="chart scatter">` +
    `<polyline fill="none" class="trail" points="${path}"/>` +
    dots +
    `</svg>`
  );
}

/**
 * Estimate trajectory for d > 2: one polyline per estimate across vertical
 * coordinate axes, recency encoded by opacity.
 */
export function parallelSvg(points: number[][], width = 260, height = 260): string {
  if (points.length === 0 || (points[0] ?? []).length === 0) {
    return `<svg xmlns="${XMLNS}" width="${width}" height="${height}" class="chart empty"></svg>`;
  }
  const dim = (points[0] as number[]).length;
  const pad = 12;
  const axisX = (j: number) =>
    dim === 1 ? width / 2 : pad + (j * (width - 2 * pad)) / (dim - 1);
  const flat = points.flat();
  const sy = rescale(flat, height - pad, pad);
  const axes = Array.from({ length: dim }, (_, j) => {
    const x = axisX(j).toFixed(2);
    return `<line class="axis" x1="${x}" y1="${pad}" x2="${x}" y2="${height - pad}"/>`;
  }).join("");
  const lines = points
    .map((p, i) => {
      const path = p.map((v, j) => `${axisX(j).toFixed(2)},${sy(v).toFixed(2)}`).join(" ");
      const opacity = points.length === 1 ? 1 : 0.25 + (0.75 * i) / (points.length - 1);
      const cls = i === points.length - 1 ? "trail latest" : "trail";
      return `<polyline fill="none" class="${cls}" opacity="${opacity.toFixed(3)}" points="${path}"/>`;
    })
    .join("");
  return (
    `<svg xmlns="${XMLNS}" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" class="chart parallel">` +
    axes +
    lines +
    `</svg>`
  );
}

export function trajectorySvg(points: number[][], dim: number, width = 260, height = 260): string {
  return dim === 2 ? scatterSvg(points, width, height) : parallelSvg(points, width, height);
}

/** Covariance-trace sparkline; the title carries the exact latest value. */
export function sparklineSvg(values: number[], width = 260, height = 48): string {
  if (values.length === 0) {
    return `<svg xmlns="${XMLNS}" width="${width}" height="${height}" class="chart empty"></svg>`;
  }
  const pad = 4;
  const sx =
    values.length === 1
      ? () => width / 2
      : (i: number) => pad + (i * (width - 2 * pad)) / (values.length - 1);
  const sy = rescale(values, height - pad, pad);
  const path = values.map((v, i) => `${sx(i).toFixed(2)},${sy(v).toFixed(2)}`).join(" ");
  const last = values[values.length - 1] as number;
  return (
    `<svg xmlns="${XMLNS}" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" class="chart sparkline">` +
    `<title>trace ${fmt(last)}</title>` +
    `<polyline fill="none" class="trail" points="${path}"/>` +
    `<circle class="dot latest" cx="${sx(values.length - 1).toFixed(2)}" cy="${sy(last).toFixed(2)}" r="3"/>` +
    `</svg>`
  );
}
