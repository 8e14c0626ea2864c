// Detail views for one selected chart: local-PC scatter panels, filmstrip
// strips, and two-axis image grids. Every interactive cell synthesizes a
// vector through the service and decodes it; results land in the gallery in
// server order. Failed decodes become placeholder cells with a tooltip.

import { ApiClient, ChartDetail } from "./api.js";
import {
  coeffsForScatterClick,
  coeffsForStripFrame,
  gridLattice,
  pcPairs,
  stripOffsets,
  DetailMode,
} from "./model.js";
import { appendToGallery, setChartCoeffs, ViewState } from "./state.js";

export interface DetailOptions {
  api: ApiClient;
  container: HTMLElement;
  galleryContainer: HTMLElement;
  state: ViewState;
}

export class DetailView {
  constructor(private options: DetailOptions) {}

  render(chart: ChartDetail, mode: DetailMode): void {
    const { container } = this.options;
    container.textContent = "";
    const heading = document.createElement("h2");
    heading.textContent =
      `chart ${chart.chart_id} - ${chart.members.length} members, d=${chart.d}`;
    container.appendChild(heading);
    if (mode === "scatterplot") {
      this.renderScatter(chart);
    } else if (mode === "filmstrip") {
      this.renderFilmstrip(chart);
    } else {
      this.renderGrids(chart);
    }
  }

  /** ceil(d/2) panels of member projections on consecutive PC pairs. */
  private renderScatter(chart: ChartDetail): void {
    for (const pair of pcPairs(chart.d)) {
      const panel = document.createElement("div");
      panel.className = "scatter-panel";
      const label = pair[1] === null ? `PC${pair[0]}` : `PC${pair[0]} / PC${pair[1]}`;
      panel.appendChild(this.caption(label));
      panel.appendChild(this.scatterSvg(chart, pair));
      this.options.container.appendChild(panel);
    }
  }

  private scatterSvg(chart: ChartDetail, pair: [number, number | null]): SVGSVGElement {
    const size = 220;
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
    svg.setAttribute("class", "scatter-svg");
    const xs = chart.member_coords.map((c) => c[pair[0] - 1]);
    const ys = chart.member_coords.map((c) => (pair[1] === null ? 0 : c[pair[1] - 1]));
    const span = Math.max(...xs.map(Math.abs), ...ys.map(Math.abs), 1e-9) * 1.1;
    const toPx = (v: number) => (v / span) * (size / 2) + size / 2;
    const fromPx = (px: number) => ((px - size / 2) / (size / 2)) * span;
    for (let i = 0; i < xs.length; i++) {
      const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
      dot.setAttribute("cx", String(toPx(xs[i])));
      dot.setAttribute("cy", String(toPx(-ys[i])));
      dot.setAttribute("r", "3");
      dot.setAttribute("class", "scatter-dot");
      svg.appendChild(dot);
    }
    svg.addEventListener("click", (event) => {
      const rect = svg.getBoundingClientRect();
      const px = ((event.clientX - rect.left) / Math.max(rect.width, 1)) * size;
      const py = ((event.clientY - rect.top) / Math.max(rect.height, 1)) * size;
      void this.handleScatterClick(chart, pair, fromPx(px), -fromPx(py));
    });
    return svg;
  }

  /** Scatter-click contract: synthesize with coefficients that are zero
   * except at the panel's two PC slots, which carry the clicked position. */
  handleScatterClick(
    chart: ChartDetail,
    pair: [number, number | null],
    a: number,
    b: number,
  ): Promise<void> {
    return this.synthesizeToGallery(chart, coeffsForScatterClick(chart.d, pair, a, b));
  }

  /** d strips, each sampling one PC at offsets −2σ..2σ. */
  private renderFilmstrip(chart: ChartDetail): void {
    const { steps, extent_sigmas, axis_scales } = chart.grid_sampling;
    for (let axis = 1; axis <= chart.d; axis++) {
      const strip = document.createElement("div");
      strip.className = "filmstrip";
      strip.appendChild(this.caption(`PC${axis}`));
      const row = document.createElement("div");
      row.className = "filmstrip-row";
      for (const offset of stripOffsets(axis_scales[axis - 1], steps, extent_sigmas)) {
        const coeffs = coeffsForStripFrame(chart.d, axis, offset);
        row.appendChild(this.decodedCell(chart, coeffs, offset.toFixed(3)));
      }
      strip.appendChild(row);
      this.options.container.appendChild(strip);
    }
  }

  /** ceil(d/2) grids of decoded samples on a steps x steps lattice. */
  private renderGrids(chart: ChartDetail): void {
    const { steps, extent_sigmas } = chart.grid_sampling;
    for (const pair of pcPairs(chart.d)) {
      const block = document.createElement("div");
      block.className = "grid-block";
      const label = pair[1] === null ? `PC${pair[0]}` : `PC${pair[0]} / PC${pair[1]}`;
      block.appendChild(this.caption(label));
      const table = document.createElement("div");
      table.className = "grid-table";
      table.style.gridTemplateColumns = `repeat(${steps}, 1fr)`;
      for (const cell of gridLattice(chart.d, pair, chart.sing_values, steps, extent_sigmas)) {
        const el = this.decodedCell(
          chart, cell.coeffs, cell.isCenter ? "center (mean)" : `cell ${cell.row},${cell.col}`,
        );
        if (cell.isCenter) el.classList.add("grid-center");
        table.appendChild(el);
      }
      block.appendChild(table);
      this.options.container.appendChild(block);
    }
  }

  private caption(text: string): HTMLElement {
    const el = document.createElement("div");
    el.className = "caption";
    el.textContent = text;
    return el;
  }

  /** An image cell that decodes its coefficients lazily and appends to the
   * gallery when clicked. Decode failures show a placeholder with a tooltip. */
  private decodedCell(chart: ChartDetail, coeffs: number[], label: string): HTMLElement {
    const cell = document.createElement("div");
    cell.className = "decode-cell";
    cell.title = label;
    const img = document.createElement("img");
    img.alt = label;
    cell.appendChild(img);
    void this.options.api
      .synthesize(chart.chart_id, coeffs, chart.d)
      .then(async (synth) => {
        const blob = await this.options.api.decodeVectorId(synth.vector_id);
        img.src = URL.createObjectURL(blob);
      })
      .catch((error) => {
        cell.classList.add("decode-failed");
        cell.title = `${label} - decode failed: ${error}`;
      });
    cell.addEventListener("click", () => void this.synthesizeToGallery(chart, coeffs));
    return cell;
  }

  async synthesizeToGallery(chart: ChartDetail, coeffs: number[]): Promise<void> {
    const { api, state } = this.options;
    setChartCoeffs(state, chart.chart_id, coeffs);
    try {
      const synth = await api.synthesize(chart.chart_id, coeffs, chart.d);
      let url: string | null = null;
      try {
        url = URL.createObjectURL(await api.decodeVectorId(synth.vector_id));
      } catch {
        url = null; // keep the gallery entry; thumbnail stays a placeholder
      }
      appendToGallery(state, {
        vectorId: synth.vector_id,
        chartId: chart.chart_id,
        coeffs,
        thumbnailUrl: url,
      });
      this.renderGallery();
    } catch (error) {
      console.error("synthesis failed", error);
    }
  }

  renderGallery(): void {
    const { galleryContainer, state } = this.options;
    galleryContainer.textContent = "";
    for (const item of state.gallery) {
      const cell = document.createElement("div");
      cell.className = "gallery-item";
      cell.title = `vector ${item.vectorId} (chart ${item.chartId})`;
      if (item.thumbnailUrl) {
        const img = document.createElement("img");
        img.src = item.thumbnailUrl;
        img.alt = cell.title;
        cell.appendChild(img);
      } else {
        cell.classList.add("decode-failed");
      }
      galleryContainer.appendChild(cell);
    }
  }
}
