// Pure view-model rules for the detail and overview renderers. Everything
// here is derived from chart metadata alone so it stays testable and so the
// grid/strip lattices are reproducible from singular values alone.

export type DetailMode = "scatterplot" | "filmstrip" | "grid";

/** 1-based PC index pairs for scatter panels and grids: (1,2), (3,4), ...
 * Odd local dimension leaves the last panel with a single axis. */
export function pcPairs(d: number): Array<[number, number | null]> {
  const pairs: Array<[number, number | null]> = [];
  for (let first = 1; first <= d; first += 2) {
    pairs.push([first, first + 1 <= d ? first + 1 : null]);
  }
  return pairs;
}

export function scatterPanelCount(d: number): number {
  return Math.ceil(d / 2);
}

export function gridCount(d: number): number {
  return Math.ceil(d / 2);
}

export function stripCount(d: number): number {
  return d;
}

/** Sampling offsets along one PC: `steps` values spanning +-extent*sigma,
 * symmetric about 0 (for the default 5 steps: -2s, -s, 0, s, 2s). */
export function stripOffsets(sigma: number, steps = 5, extentSigmas = 2): number[] {
  if (steps < 2 || steps % 2 === 0) {
    throw new Error(`steps must be odd and >= 3, got ${steps}`);
  }
  const offsets: number[] = [];
  const half = (steps - 1) / 2;
  for (let i = -half; i <= half; i++) {
    offsets.push((i / half) * extentSigmas * sigma);
  }
  return offsets;
}

export interface GridCell {
  row: number;
  col: number;
  coeffs: number[];
  isCenter: boolean;
}

/** A size x size lattice over one PC pair, spanning +-extent*sigma per axis.
 * The center cell has all-zero coefficients (it decodes the chart mean). */
export function gridLattice(
  d: number,
  pair: [number, number | null],
  singValues: number[],
  size = 5,
  extentSigmas = 2,
): GridCell[] {
  const [axisA, axisB] = pair;
  const offsetsA = stripOffsets(singValues[axisA - 1], size, extentSigmas);
  const offsetsB =
    axisB === null ? [0] : stripOffsets(singValues[axisB - 1], size, extentSigmas);
  const cells: GridCell[] = [];
  for (let row = 0; row < offsetsB.length; row++) {
    for (let col = 0; col < size; col++) {
      const coeffs = new Array<number>(d).fill(0);
      coeffs[axisA - 1] = offsetsA[col];
      if (axisB !== null) {
        // rows run top-to-bottom, so the second axis decreases with row
        coeffs[axisB - 1] = offsetsB[offsetsB.length - 1 - row];
      }
      cells.push({
        row,
        col,
        coeffs,
        isCenter: coeffs.every((c) => c === 0),
      });
    }
  }
  return cells;
}

/** Coefficients for a click at data position (a, b) on a scatter panel:
 * zero everywhere except the panel's two PC slots. */
export function coeffsForScatterClick(
  d: number,
  pair: [number, number | null],
  a: number,
  b: number,
): number[] {
  const coeffs = new Array<number>(d).fill(0);
  coeffs[pair[0] - 1] = a;
  if (pair[1] !== null) {
    coeffs[pair[1] - 1] = b;
  }
  return coeffs;
}

/** Coefficients for one filmstrip frame: a single PC offset. */
export function coeffsForStripFrame(d: number, axis: number, offset: number): number[] {
  const coeffs = new Array<number>(d).fill(0);
  coeffs[axis - 1] = offset;
  return coeffs;
}

export function validCoeffs(d: number, coeffs: number[]): boolean {
  return coeffs.length === d && coeffs.every((c) => Number.isFinite(c));
}

/** Semantic zoom: a node shows its thumbnail once its apparent radius
 * (render radius times zoom) clears the threshold. */
export function thumbnailVisible(
  renderRadius: number,
  zoom: number,
  threshold: number,
): boolean {
  return renderRadius * zoom >= threshold;
}

export function visibleThumbnails<T extends { render_radius: number }>(
  nodes: T[],
  zoom: number,
  threshold: number,
): T[] {
  return nodes.filter((n) => thumbnailVisible(n.render_radius, zoom, threshold));
}
