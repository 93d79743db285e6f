// DOM rendering. Pure state lives in state.ts; this layer only draws it and
// forwards events to the handlers the app wires in.

import { boxToScreen, imageToScreen, screenToImage, viewport } from "./coords.js";
import { markerPosition, type ViewState, AGGREGATE_TAB, dictionaryBlock } from "./state.js";
import { isRTL } from "./keyboard.js";
import type { DictionaryBlock, PageBlock } from "./types.js";

export interface Handlers {
  onTab(tab: string): void;
  onPage(dictionary: string, page: number): void;
  onZoom(zoom: number): void;
  onFeedback(dictionary: string, page: number, verdict: "present" | "absent"): void;
  onMarkerPlace(dictionary: string, page: number, x: number, y: number): void;
  onMarkerDragStart(dictionary: string, page: number, word: string, x: number, y: number): void;
  onMarkerDragMove(x: number, y: number): void;
  onMarkerDragEnd(): void;
  onAnnotate(dictionary: string, page: number, text: string): void;
  onDigitize(dictionary: string, fields: Record<string, string>): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderTabs(root: HTMLElement, state: ViewState, handlers: Handlers): void {
  root.replaceChildren();
  for (const tab of state.tabs) {
    const button = el("button", tab === state.activeTab ? "tab active" : "tab");
    button.textContent = tab === AGGREGATE_TAB ? "Unicode results" : tab;
    button.addEventListener("click", () => handlers.onTab(tab));
    root.append(button);
  }
}

function renderExistsNotice(block: DictionaryBlock): HTMLElement {
  if (block.exists === "no") {
    return el("p", "notice notice-no", "This word is not in this dictionary.");
  }
  if (block.exists === "maybe") {
    return el(
      "p",
      "notice notice-maybe",
      "The word should be on one of these pages. Did you find it?",
    );
  }
  return el("p", "notice notice-yes", "Found in this dictionary.");
}

function renderToolbar(
  dictionary: string,
  state: ViewState,
  handlers: Handlers,
): HTMLElement {
  const bar = el("div", "toolbar");
  const prev = el("button", "", "‹");
  prev.addEventListener("click", () =>
    handlers.onPage(dictionary, (state.currentPage[dictionary] ?? 1) - 1),
  );
  const next = el("button", "", "›");
  next.addEventListener("click", () =>
    handlers.onPage(dictionary, (state.currentPage[dictionary] ?? 1) + 1),
  );
  const jump = el("input") as HTMLInputElement;
  jump.type = "number";
  jump.value = String(state.currentPage[dictionary] ?? 1);
  jump.addEventListener("change", () => handlers.onPage(dictionary, Number(jump.value)));
  const zoomOut = el("button", "", "−");
  zoomOut.addEventListener("click", () => handlers.onZoom(state.zoom / 2));
  const zoomIn = el("button", "", "+");
  zoomIn.addEventListener("click", () => handlers.onZoom(state.zoom * 2));
  const zoomLabel = el("span", "zoom-label", `${Math.round(state.zoom * 100)}%`);
  bar.append(prev, jump, next, zoomOut, zoomLabel, zoomIn);
  return bar;
}

function renderPage(
  dictionary: string,
  page: PageBlock,
  state: ViewState,
  handlers: Handlers,
): HTMLElement {
  const container = el("div", "page");
  if (page.missing) {
    const placeholder = el("div", "missing-page");
    placeholder.append(
      el("p", "", `Page ${page.number} is missing from this scan.`),
      el("p", "", "If you own a copy of this book, please contribute the page."),
    );
    container.append(placeholder);
    return container;
  }
  const view = viewport(state.zoom);
  const frame = el("div", "page-frame");
  frame.style.position = "relative";
  frame.style.width = `${Math.round(page.width * state.zoom)}px`;
  frame.style.height = `${Math.round(page.height * state.zoom)}px`;

  const image = el("img", "page-image") as HTMLImageElement;
  image.src = page.src;
  image.width = Math.round(page.width * state.zoom);
  image.height = Math.round(page.height * state.zoom);
  image.draggable = false;
  // Clicking the scan proposes a marker at that spot (start of the headword
  // in reading order).
  image.addEventListener("dblclick", (event) => {
    const rect = image.getBoundingClientRect();
    const position = screenToImage(view, event.clientX - rect.left, event.clientY - rect.top);
    handlers.onMarkerPlace(dictionary, page.number, position.x, position.y);
  });
  frame.append(image);

  for (const box of page.boxes) {
    const scaled = boxToScreen(view, box);
    const overlay = el("div", "region-box");
    overlay.style.position = "absolute";
    overlay.style.left = `${scaled.left}px`;
    overlay.style.top = `${scaled.top}px`;
    overlay.style.width = `${scaled.width}px`;
    overlay.style.height = `${scaled.height}px`;
    frame.append(overlay);
  }

  const marker = markerPosition(state, dictionary, page.number, state.query);
  if (marker) {
    const pin = el("div", "marker-pin");
    const screen = imageToScreen(view, marker.x, marker.y);
    pin.style.position = "absolute";
    pin.style.left = `${screen.x}px`;
    pin.style.top = `${screen.y}px`;
    pin.title = state.query;
    pin.addEventListener("pointerdown", (event) => {
      event.preventDefault();
      handlers.onMarkerDragStart(dictionary, page.number, state.query, marker.x, marker.y);
    });
    frame.append(pin);
    const panel = el("div", "annotation-panel");
    for (const annotation of page.annotations) {
      const item = el("div", "annotation");
      item.append(
        el("p", "annotation-text", annotation.text),
        el("small", "annotation-meta", `${annotation.meta.contributor ?? ""} ${annotation.meta.updated ?? ""}`),
      );
      panel.append(item);
    }
    frame.append(panel);
  }

  frame.addEventListener("pointermove", (event) => {
    if (!state.markerDrag) return;
    const rect = frame.getBoundingClientRect();
    const position = screenToImage(view, event.clientX - rect.left, event.clientY - rect.top);
    handlers.onMarkerDragMove(position.x, position.y);
  });
  frame.addEventListener("pointerup", () => handlers.onMarkerDragEnd());

  container.append(frame);

  if (state.response && dictionaryBlock(state, dictionary)?.exists === "maybe") {
    const prompt = el("div", "feedback-prompt");
    prompt.append(el("span", "", "Found the word on this page?"));
    const yes = el("button", "", "Found it");
    yes.addEventListener("click", () => handlers.onFeedback(dictionary, page.number, "present"));
    const no = el("button", "", "Not here");
    no.addEventListener("click", () => handlers.onFeedback(dictionary, page.number, "absent"));
    prompt.append(yes, no);
    container.append(prompt);
  }

  const annotate = el("form", "annotate-form") as HTMLFormElement;
  const text = el("input") as HTMLInputElement;
  text.placeholder = "Add a comment or related resource";
  const submit = el("button", "", "Annotate");
  annotate.append(text, submit);
  annotate.addEventListener("submit", (event) => {
    event.preventDefault();
    if (text.value.trim()) handlers.onAnnotate(dictionary, page.number, text.value.trim());
  });
  container.append(annotate);
  return container;
}

export function renderActiveTab(root: HTMLElement, state: ViewState, handlers: Handlers): void {
  root.replaceChildren();
  if (!state.response || !state.activeTab) return;
  if (state.activeTab === AGGREGATE_TAB) {
    const list = el("div", "aggregate");
    for (const definition of state.response.definitions) {
      const item = el("div", "definition");
      item.append(
        el("p", "definition-text", definition.text),
        el("small", "definition-meta", String(definition.meta.contributor ?? "")),
      );
      list.append(item);
    }
    for (const resource of state.response.resources) {
      const link = el("a", "resource", resource.href) as HTMLAnchorElement;
      link.href = resource.href;
      list.append(link);
    }
    if (list.childElementCount === 0) {
      list.append(el("p", "notice", "No Unicode results for this word yet."));
    }
    root.append(list);
    return;
  }
  const block = dictionaryBlock(state, state.activeTab);
  if (!block) return;
  root.append(renderExistsNotice(block));
  root.append(renderToolbar(state.activeTab, state, handlers));
  const wanted = state.currentPage[state.activeTab];
  // Only the visible page's image loads; other candidate pages stay lazy.
  const visible = block.pages.find((p) => p.number === wanted) ?? block.pages[0];
  if (visible) {
    root.append(renderPage(state.activeTab, visible, state, handlers));
  }
  const digitize = el("form", "digitize-form") as HTMLFormElement;
  const definition = el("input") as HTMLInputElement;
  definition.placeholder = "Definition (Unicode)";
  const pos = el("input") as HTMLInputElement;
  pos.placeholder = "Part of speech";
  const send = el("button", "", "Digitize");
  digitize.append(definition, pos, send);
  digitize.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onDigitize(state.activeTab as string, {
      definition: definition.value,
      part_of_speech: pos.value,
    });
  });
  root.append(digitize);
}

export function applyDirection(root: HTMLElement, direction: string): void {
  root.dir = isRTL(direction) ? "rtl" : "ltr";
}
