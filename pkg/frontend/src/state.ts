// Session view state: selection, zoom, per-chart coefficients, and the
// synthesis gallery. The gallery is append-only and ordered by the
// server-assigned vector id, so the whole state is reconstructible from
// /api/history after a refresh.

import { HistoryEntry } from "./api.js";
import { DetailMode } from "./model.js";

export interface GalleryItem {
  vectorId: number;
  chartId: number;
  coeffs: number[];
  thumbnailUrl: string | null;
}

export interface ViewState {
  selectedChartId: number | null;
  zoomLevel: number;
  detailMode: DetailMode;
  coeffsByChart: Map<number, number[]>;
  gallery: GalleryItem[];
}

export function initialViewState(): ViewState {
  return {
    selectedChartId: null,
    zoomLevel: 1,
    detailMode: "scatterplot",
    coeffsByChart: new Map(),
    gallery: [],
  };
}

/** Insert preserving strict vector-id order regardless of response arrival
 * order; duplicate ids are ignored (decode retries reuse the entry). */
export function appendToGallery(state: ViewState, item: GalleryItem): void {
  if (state.gallery.some((g) => g.vectorId === item.vectorId)) return;
  const at = state.gallery.findIndex((g) => g.vectorId > item.vectorId);
  if (at === -1) {
    state.gallery.push(item);
  } else {
    state.gallery.splice(at, 0, item);
  }
}

export function setChartCoeffs(state: ViewState, chartId: number, coeffs: number[]): void {
  state.coeffsByChart.set(chartId, [...coeffs]);
}

/** Rebuild state from the server-side synthesis history (refresh safety). */
export function reconstructFromHistory(
  entries: HistoryEntry[],
  selectedChartId: number | null = null,
): ViewState {
  const state = initialViewState();
  state.selectedChartId = selectedChartId;
  for (const entry of [...entries].sort((a, b) => a.vector_id - b.vector_id)) {
    appendToGallery(state, {
      vectorId: entry.vector_id,
      chartId: entry.chart_id,
      coeffs: entry.coeffs,
      thumbnailUrl: null,
    });
    state.coeffsByChart.set(entry.chart_id, [...entry.coeffs]);
  }
  return state;
}
