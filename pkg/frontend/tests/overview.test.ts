// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { ApiClient, AtlasDocument, FetchLike, LayoutNode } from "../src/api.js";
import { Overview, THUMBNAIL_THRESHOLD } from "../src/overview.js";

function atlasFixture(): AtlasDocument {
  return {
    schema_version: "1",
    d_max: 8,
    charts: [
      { chart_id: 0, center_id: 0, d: 2, members: [0, 1, 2], mean: [0, 0] },
      { chart_id: 1, center_id: 3, d: 2, members: [3], mean: [1, 1] },
    ],
    edges: [[0, 1, 1]],
  };
}

function layoutFixture(): LayoutNode[] {
  return [
    { chart_id: 0, x: 0, y: 0, render_radius: 1.0 },
    { chart_id: 1, x: 2, y: 0, render_radius: 0.1 },
  ];
}

function decodeCountingApi(): { api: ApiClient; decoded: number[][] } {
  const decoded: number[][] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    if (url.endsWith("/api/decode")) {
      decoded.push(JSON.parse(String(init?.body)).vector);
      return new Response(new Blob(["<svg/>"]), { status: 200 });
    }
    return new Response("{}", { status: 200 });
  };
  return { api: new ApiClient("", fetchImpl), decoded };
}

describe("overview", () => {
  it("draws one selectable node per chart with edges hidden", () => {
    const { api } = decodeCountingApi();
    const container = document.createElement("div");
    document.body.appendChild(container);
    const selections: number[] = [];
    new Overview({
      api,
      container,
      atlas: atlasFixture(),
      layout: layoutFixture(),
      onSelect: (id) => selections.push(id),
    });
    const nodes = container.querySelectorAll(".overview-node");
    expect(nodes.length).toBe(2);
    expect(container.querySelectorAll("line").length).toBe(0); // edges hidden
    (nodes[1] as SVGGElement).dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(selections).toEqual([1]);
  });

  it("semantic zoom: at zoom 1 only large nodes decode thumbnails", async () => {
    const { api, decoded } = decodeCountingApi();
    const container = document.createElement("div");
    document.body.appendChild(container);
    const overview = new Overview({
      api,
      container,
      atlas: atlasFixture(),
      layout: layoutFixture(),
      onSelect: () => {},
    });
    // unit scale is 24px: node 0 has apparent radius 24 < threshold at zoom 1
    expect(THUMBNAIL_THRESHOLD).toBeGreaterThan(0);
    await overview.refreshThumbnails();
    expect(decoded.length).toBe(0);

    // zooming in makes node 0 (radius 1.0) clear the threshold; node 1
    // (radius 0.1) stays below it
    (overview as unknown as { zoom: number }).zoom = 2;
    await overview.refreshThumbnails();
    expect(decoded).toEqual([[0, 0]]); // chart 0 mean, the representative vector

    (overview as unknown as { zoom: number }).zoom = 40;
    await overview.refreshThumbnails();
    expect(decoded.length).toBe(2);
    expect(decoded[1]).toEqual([1, 1]);
  });
});
