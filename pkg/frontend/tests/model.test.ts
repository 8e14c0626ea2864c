import { describe, expect, it } from "vitest";

import {
  coeffsForScatterClick,
  coeffsForStripFrame,
  gridCount,
  gridLattice,
  pcPairs,
  scatterPanelCount,
  stripCount,
  stripOffsets,
  thumbnailVisible,
  validCoeffs,
  visibleThumbnails,
} from "../src/model.js";

describe("panel counting rules", () => {
  it("d=8 yields 4 scatter panels, 4 grids, 8 strips", () => {
    expect(scatterPanelCount(8)).toBe(4);
    expect(gridCount(8)).toBe(4);
    expect(stripCount(8)).toBe(8);
    expect(pcPairs(8)).toEqual([[1, 2], [3, 4], [5, 6], [7, 8]]);
  });

  it("odd d leaves a single-axis last panel", () => {
    expect(scatterPanelCount(5)).toBe(3);
    expect(pcPairs(5)).toEqual([[1, 2], [3, 4], [5, null]]);
  });

  it("d=1 still renders one panel and one strip", () => {
    expect(pcPairs(1)).toEqual([[1, null]]);
    expect(stripCount(1)).toBe(1);
  });
});

describe("filmstrip offsets", () => {
  it("default 5 steps are -2s, -s, 0, s, 2s", () => {
    expect(stripOffsets(0.5)).toEqual([-2 * 0.5, -0.5, 0, 0.5, 2 * 0.5]);
  });

  it("offsets are symmetric about zero for any odd step count", () => {
    for (const steps of [3, 5, 7, 9]) {
      const offsets = stripOffsets(1.3, steps);
      expect(offsets.length).toBe(steps);
      for (let i = 0; i < steps; i++) {
        expect(offsets[i]).toBeCloseTo(-offsets[steps - 1 - i], 12);
      }
    }
  });

  it("rejects even step counts", () => {
    expect(() => stripOffsets(1.0, 4)).toThrow();
  });
});

describe("grid lattice", () => {
  const sing = [2.0, 1.0, 0.5, 0.25];

  it("is a steps x steps lattice spanning +-2 sigma per axis", () => {
    const cells = gridLattice(4, [1, 2], sing, 5, 2);
    expect(cells.length).toBe(25);
    const xs = cells.map((c) => c.coeffs[0]);
    const ys = cells.map((c) => c.coeffs[1]);
    expect(Math.max(...xs)).toBeCloseTo(2 * sing[0]);
    expect(Math.min(...xs)).toBeCloseTo(-2 * sing[0]);
    expect(Math.max(...ys)).toBeCloseTo(2 * sing[1]);
    expect(Math.min(...ys)).toBeCloseTo(-2 * sing[1]);
  });

  it("has exactly one center cell with all-zero coefficients", () => {
    const centers = gridLattice(4, [3, 4], sing).filter((c) => c.isCenter);
    expect(centers.length).toBe(1);
    expect(centers[0].coeffs).toEqual([0, 0, 0, 0]);
    expect(centers[0].row).toBe(2);
    expect(centers[0].col).toBe(2);
  });

  it("touches only the pair's axes", () => {
    for (const cell of gridLattice(4, [3, 4], sing)) {
      expect(cell.coeffs[0]).toBe(0);
      expect(cell.coeffs[1]).toBe(0);
    }
  });

  it("is reproducible from singular values alone", () => {
    const a = gridLattice(4, [1, 2], sing);
    const b = gridLattice(4, [1, 2], [...sing]);
    expect(a).toEqual(b);
  });

  it("lattice coordinates are symmetric about zero", () => {
    const cells = gridLattice(2, [1, 2], [1.5, 0.75]);
    const xs = new Set(cells.map((c) => c.coeffs[0]));
    for (const x of xs) {
      expect(xs.has(-x)).toBe(true);
    }
  });
});

describe("scatter click coefficient contract", () => {
  it("panel (PC3, PC4) click puts (a, b) at positions 3 and 4", () => {
    const coeffs = coeffsForScatterClick(8, [3, 4], 0.7, -1.2);
    expect(coeffs).toEqual([0, 0, 0.7, -1.2, 0, 0, 0, 0]);
  });

  it("single-axis panel keeps b out", () => {
    expect(coeffsForScatterClick(5, [5, null], 0.4, 9.9)).toEqual([0, 0, 0, 0, 0.4]);
  });
});

describe("strip frame coefficients", () => {
  it("touches exactly one axis", () => {
    expect(coeffsForStripFrame(6, 4, -0.8)).toEqual([0, 0, 0, -0.8, 0, 0]);
  });
});

describe("coefficient validation mirrors the server contract", () => {
  it("accepts exact-length finite coefficients", () => {
    expect(validCoeffs(3, [0, 1, 2])).toBe(true);
  });

  it("rejects wrong length and non-finite entries", () => {
    expect(validCoeffs(3, [0, 1])).toBe(false);
    expect(validCoeffs(3, [0, 1, 2, 3])).toBe(false);
    expect(validCoeffs(3, [0, NaN, 2])).toBe(false);
  });
});

describe("semantic zoom threshold rule", () => {
  it("reveals a thumbnail once apparent radius clears the threshold", () => {
    expect(thumbnailVisible(10, 1, 28)).toBe(false);
    expect(thumbnailVisible(10, 2.8, 28)).toBe(true);
    expect(thumbnailVisible(10, 2.79, 28)).toBe(false);
  });

  it("zoomed out far, only the largest nodes keep thumbnails", () => {
    const nodes = [
      { chart_id: 0, render_radius: 1.0 },
      { chart_id: 1, render_radius: 0.4 },
      { chart_id: 2, render_radius: 0.1 },
    ];
    const zoomedOut = visibleThumbnails(nodes, 30, 28);
    expect(zoomedOut.map((n) => n.chart_id)).toEqual([0]);
    const zoomedIn = visibleThumbnails(nodes, 300, 28);
    expect(zoomedIn.length).toBe(3);
  });
});
