// Zoomable chart-graph overview: one circle per chart at its served layout
// position, radius area-proportional to member count. Edges stay hidden
// (they exist in the atlas data only). Zooming in reveals thumbnails for
// nodes whose apparent size clears the semantic-zoom threshold.

import { ApiClient, AtlasDocument, LayoutNode } from "./api.js";
import { thumbnailVisible } from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";
export const THUMBNAIL_THRESHOLD = 28; // apparent node radius in px

export interface OverviewOptions {
  api: ApiClient;
  container: HTMLElement;
  atlas: AtlasDocument;
  layout: LayoutNode[];
  onSelect: (chartId: number) => void;
}

export class Overview {
  private svg: SVGSVGElement;
  private scene: SVGGElement;
  private zoom = 1;
  private panX = 0;
  private panY = 0;
  private unitScale: number;
  private thumbnails = new Map<number, string>();
  private nodeElements = new Map<number, SVGGElement>();
  private meanByChart = new Map<number, number[]>();

  constructor(private options: OverviewOptions) {
    const { container, layout, atlas } = options;
    container.textContent = "";
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("class", "overview-svg");
    this.scene = document.createElementNS(SVG_NS, "g");
    this.svg.appendChild(this.scene);
    container.appendChild(this.svg);

    for (const chart of atlas.charts) {
      this.meanByChart.set(chart.chart_id, chart.mean);
    }
    // scale layout units so a radius-1 node is ~24 px at zoom 1
    this.unitScale = 24;
    const xs = layout.map((n) => n.x);
    const ys = layout.map((n) => n.y);
    this.panX = -Math.min(...xs) * this.unitScale + 60;
    this.panY = -Math.min(...ys) * this.unitScale + 60;

    this.renderNodes();
    this.svg.addEventListener("wheel", (event) => this.onWheel(event), { passive: false });
    this.enableDragPan();
    this.applyTransform();
  }

  get zoomLevel(): number {
    return this.zoom;
  }

  private renderNodes(): void {
    for (const node of this.options.layout) {
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("class", "overview-node");
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(node.x * this.unitScale));
      circle.setAttribute("cy", String(node.y * this.unitScale));
      circle.setAttribute("r", String(node.render_radius * this.unitScale));
      group.appendChild(circle);
      group.addEventListener("click", () => this.options.onSelect(node.chart_id));
      this.scene.appendChild(group);
      this.nodeElements.set(node.chart_id, group);
    }
  }

  private onWheel(event: WheelEvent): void {
    event.preventDefault();
    const factor = event.deltaY < 0 ? 1.15 : 1 / 1.15;
    this.zoom = Math.min(40, Math.max(0.05, this.zoom * factor));
    this.applyTransform();
    void this.refreshThumbnails();
  }

  private enableDragPan(): void {
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    this.svg.addEventListener("pointerdown", (e) => {
      dragging = true;
      lastX = e.clientX;
      lastY = e.clientY;
    });
    this.svg.addEventListener("pointermove", (e) => {
      if (!dragging) return;
      this.panX += e.clientX - lastX;
      this.panY += e.clientY - lastY;
      lastX = e.clientX;
      lastY = e.clientY;
      this.applyTransform();
    });
    this.svg.addEventListener("pointerup", () => {
      dragging = false;
    });
  }

  private applyTransform(): void {
    this.scene.setAttribute(
      "transform",
      `translate(${this.panX},${this.panY}) scale(${this.zoom})`,
    );
  }

  /** Fetch and attach thumbnails for every node whose apparent radius clears
   * the semantic-zoom threshold at the current zoom level. */
  async refreshThumbnails(): Promise<void> {
    for (const node of this.options.layout) {
      const apparent = node.render_radius * this.unitScale;
      if (!thumbnailVisible(apparent, this.zoom, THUMBNAIL_THRESHOLD)) continue;
      if (this.thumbnails.has(node.chart_id)) continue;
      const mean = this.meanByChart.get(node.chart_id);
      if (!mean) continue;
      this.thumbnails.set(node.chart_id, "pending");
      try {
        // representative vector per chart: the member centroid
        const blob = await this.options.api.decodeVector(mean);
        const url = URL.createObjectURL(blob);
        this.thumbnails.set(node.chart_id, url);
        this.attachThumbnail(node, url);
      } catch {
        this.thumbnails.delete(node.chart_id);
      }
    }
  }

  private attachThumbnail(node: LayoutNode, url: string): void {
    const group = this.nodeElements.get(node.chart_id);
    if (!group) return;
    const radius = node.render_radius * this.unitScale;
    const image = document.createElementNS(SVG_NS, "image");
    image.setAttribute("href", url);
    image.setAttribute("x", String(node.x * this.unitScale - radius * 0.7));
    image.setAttribute("y", String(node.y * this.unitScale - radius * 0.7));
    image.setAttribute("width", String(radius * 1.4));
    image.setAttribute("height", String(radius * 1.4));
    image.setAttribute("clip-path", "circle()");
    image.setAttribute("pointer-events", "none");
    group.appendChild(image);
  }
}
