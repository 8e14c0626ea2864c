// Application entry: load atlas + layout, draw the overview, and open detail
// views on selection. A visible banner with a retry button covers the
// service-unreachable case.

import { ApiClient } from "./api.js";
import { DetailView } from "./detail.js";
import { DetailMode } from "./model.js";
import { Overview } from "./overview.js";
import { initialViewState, reconstructFromHistory } from "./state.js";

const api = new ApiClient("");
let state = initialViewState();
let detailView: DetailView | null = null;
let currentChartId: number | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function showBanner(message: string, retry: () => void): void {
  const banner = el("banner");
  banner.textContent = "";
  banner.classList.remove("hidden");
  const text = document.createElement("span");
  text.textContent = message;
  const button = document.createElement("button");
  button.textContent = "retry";
  button.addEventListener("click", () => {
    banner.classList.add("hidden");
    retry();
  });
  banner.append(text, button);
}

async function openChart(chartId: number): Promise<void> {
  currentChartId = chartId;
  state.selectedChartId = chartId;
  try {
    const chart = await api.chart(chartId);
    const mode = state.detailMode;
    detailView = new DetailView({
      api,
      container: el("detail"),
      galleryContainer: el("gallery"),
      state,
    });
    detailView.render(chart, mode);
    detailView.renderGallery();
  } catch (error) {
    showBanner(`failed to load chart ${chartId}: ${error}`, () => void openChart(chartId));
  }
}

function wireModeSwitcher(): void {
  for (const mode of ["scatterplot", "filmstrip", "grid"] as DetailMode[]) {
    el(`mode-${mode}`).addEventListener("click", () => {
      state.detailMode = mode;
      if (currentChartId !== null) void openChart(currentChartId);
    });
  }
}

async function boot(): Promise<void> {
  try {
    const [atlas, layout, history] = await Promise.all([
      api.atlas(),
      api.layout(),
      api.history(),
    ]);
    state = reconstructFromHistory(history.entries, null);
    const overview = new Overview({
      api,
      container: el("overview"),
      atlas,
      layout: layout.nodes,
      onSelect: (chartId) => void openChart(chartId),
    });
    void overview.refreshThumbnails();
    wireModeSwitcher();
  } catch (error) {
    showBanner(`service unreachable: ${error}`, () => void boot());
  }
}

void boot();
