// View state and its pure update functions.
//
// Every displayed exists/page/location value originates from a service
// response; updates after a contribution re-render from the server's
// acknowledged aggregate, never from local input alone (a dragged marker
// lands where the server's aggregation policy puts it).

import type { DictionaryBlock, Location, MarkerAck, SearchResponse } from "./types.js";

export const AGGREGATE_TAB = "aggregate";

export interface MarkerDrag {
  dictionary: string;
  page: number;
  word: string;
  position: Location; // current drag position, image coordinates
}

export interface ViewState {
  language: string | null;
  languageDirection: "ltr" | "rtl";
  query: string;
  response: SearchResponse | null;
  tabs: string[];
  activeTab: string | null;
  currentPage: Record<string, number>;
  pageCount: Record<string, number>;
  zoom: number;
  markerDrag: MarkerDrag | null;
  // (dictionary:page:word) -> marker position as last acknowledged by the server
  markers: Record<string, Location>;
}

export function initialState(): ViewState {
  return {
    language: null,
    languageDirection: "ltr",
    query: "",
    response: null,
    tabs: [],
    activeTab: null,
    currentPage: {},
    pageCount: {},
    zoom: 1,
    markerDrag: null,
    markers: {},
  };
}

export function markerKey(dictionary: string, page: number, word: string): string {
  return `${dictionary}:${page}:${word}`;
}

export function selectLanguage(
  state: ViewState,
  code: string,
  direction: "ltr" | "rtl",
  pageCounts: Record<string, number>,
): ViewState {
  return {
    ...initialState(),
    language: code,
    languageDirection: direction,
    zoom: state.zoom,
    pageCount: pageCounts,
  };
}

export function applySearchResponse(state: ViewState, response: SearchResponse): ViewState {
  const tabs = [...response.dictionaries.map((d) => d.id), AGGREGATE_TAB];
  const currentPage: Record<string, number> = {};
  const markers: Record<string, Location> = {};
  for (const block of response.dictionaries) {
    currentPage[block.id] = block.pages.length > 0 ? block.pages[0].number : 1;
    for (const page of block.pages) {
      if (page.location) {
        markers[markerKey(block.id, page.number, response.query)] = page.location;
      }
    }
  }
  const activeTab =
    state.activeTab !== null && tabs.includes(state.activeTab) ? state.activeTab : tabs[0];
  return { ...state, query: response.query, response, tabs, activeTab, currentPage, markers };
}

export function setActiveTab(state: ViewState, tab: string): ViewState {
  if (!state.tabs.includes(tab)) return state;
  return { ...state, activeTab: tab };
}

function clampPage(state: ViewState, dictionary: string, page: number): number {
  const limit = state.pageCount[dictionary] ?? Number.MAX_SAFE_INTEGER;
  return Math.min(Math.max(page, 1), limit);
}

export function setPage(state: ViewState, dictionary: string, page: number): ViewState {
  return {
    ...state,
    currentPage: { ...state.currentPage, [dictionary]: clampPage(state, dictionary, page) },
  };
}

export function flipPage(state: ViewState, dictionary: string, delta: number): ViewState {
  const current = state.currentPage[dictionary] ?? 1;
  return setPage(state, dictionary, current + delta);
}

export function setZoom(state: ViewState, zoom: number): ViewState {
  return { ...state, zoom: Math.min(Math.max(zoom, 0.125), 8) };
}

export function dictionaryBlock(state: ViewState, dictionary: string): DictionaryBlock | null {
  return state.response?.dictionaries.find((d) => d.id === dictionary) ?? null;
}

// -- marker drag lifecycle ----------------------------------------------------

export function beginMarkerDrag(
  state: ViewState,
  dictionary: string,
  page: number,
  word: string,
  position: Location,
): ViewState {
  return { ...state, markerDrag: { dictionary, page, word, position } };
}

export function moveMarkerDrag(state: ViewState, position: Location): ViewState {
  if (!state.markerDrag) return state;
  return { ...state, markerDrag: { ...state.markerDrag, position } };
}

export function cancelMarkerDrag(state: ViewState): ViewState {
  return { ...state, markerDrag: null };
}

// Commit uses only the server's acknowledged aggregate: the marker renders at
// the aggregation policy's output, not at the local drag endpoint.
export function commitMarkerDrag(state: ViewState, ack: MarkerAck): ViewState {
  const drag = state.markerDrag;
  if (!drag) return state;
  const key = markerKey(drag.dictionary, ack.marker.page, ack.marker.word);
  return {
    ...state,
    markerDrag: null,
    markers: { ...state.markers, [key]: { x: ack.marker.x, y: ack.marker.y } },
  };
}

export function markerPosition(
  state: ViewState,
  dictionary: string,
  page: number,
  word: string,
): Location | null {
  if (
    state.markerDrag &&
    state.markerDrag.dictionary === dictionary &&
    state.markerDrag.page === page &&
    state.markerDrag.word === word
  ) {
    return state.markerDrag.position;
  }
  return state.markers[markerKey(dictionary, page, word)] ?? null;
}
