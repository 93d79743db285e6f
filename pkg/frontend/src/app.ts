// Application bootstrap: wires the API client, state, and renderers.

import { ApiClient, ServiceError } from "./api.js";
import { PrefixExplorer, matchesFilter, typedPath } from "./tree.js";
import { layoutRows, pressKey } from "./keyboard.js";
import {
  applySearchResponse,
  beginMarkerDrag,
  cancelMarkerDrag,
  commitMarkerDrag,
  initialState,
  moveMarkerDrag,
  selectLanguage,
  setActiveTab,
  setPage,
  setZoom,
  type ViewState,
} from "./state.js";
import { applyDirection, renderActiveTab, renderTabs, type Handlers } from "./render.js";
import type { BucketInfo, LanguageInfo } from "./types.js";

const CONTRIBUTOR_KEY = "rasterdict-contributor";

function contributor(): string {
  let id = localStorage.getItem(CONTRIBUTOR_KEY);
  if (!id) {
    id = `web-${Math.random().toString(36).slice(2, 10)}`;
    localStorage.setItem(CONTRIBUTOR_KEY, id);
  }
  return id;
}

export class ExplorerApp {
  state: ViewState = initialState();
  private languages: LanguageInfo[] = [];
  private explorer: PrefixExplorer | null = null;

  constructor(
    private api: ApiClient,
    private dom: {
      root: HTMLElement;
      languageSelect: HTMLSelectElement;
      searchBox: HTMLInputElement;
      keyboard: HTMLElement;
      tree: HTMLElement;
      tabs: HTMLElement;
      content: HTMLElement;
      banner: HTMLElement;
    },
  ) {}

  async start(): Promise<void> {
    const listing = await this.api.languages();
    this.languages = listing.languages;
    this.dom.languageSelect.replaceChildren(
      ...this.languages.map((lang) => {
        const option = document.createElement("option");
        option.value = lang.code;
        option.textContent = lang.display_name || lang.code;
        return option;
      }),
    );
    this.dom.languageSelect.addEventListener("change", () => {
      void this.pickLanguage(this.dom.languageSelect.value);
    });
    this.dom.searchBox.addEventListener("input", () => {
      void this.refreshTree();
    });
    this.dom.searchBox.addEventListener("keydown", (event) => {
      if (event.key === "Enter") void this.runLookup(this.dom.searchBox.value);
    });
    if (this.languages.length > 0) {
      await this.pickLanguage(this.languages[0].code);
    }
  }

  async pickLanguage(code: string): Promise<void> {
    const info = this.languages.find((l) => l.code === code);
    if (!info) return;
    const pageCounts = Object.fromEntries(
      info.dictionaries.map((d) => [d.id, d.page_count]),
    );
    this.state = selectLanguage(this.state, code, info.direction, pageCounts);
    applyDirection(this.dom.root, info.direction);
    this.explorer = new PrefixExplorer((prefix) => this.api.listPrefix(code, prefix));
    await Promise.all([this.renderKeyboard(code), this.refreshTree()]);
    this.renderAll();
  }

  private async renderKeyboard(code: string): Promise<void> {
    this.dom.keyboard.replaceChildren();
    try {
      const { layout } = await this.api.keyboard(code);
      for (const row of layoutRows(layout)) {
        const rowEl = document.createElement("div");
        rowEl.className = "keyboard-row";
        for (const key of [...row, "␣", "⌫"]) {
          const button = document.createElement("button");
          button.textContent = key;
          button.addEventListener("click", () => {
            this.dom.searchBox.value = pressKey(this.dom.searchBox.value, key);
            void this.refreshTree();
          });
          rowEl.append(button);
        }
        this.dom.keyboard.append(rowEl);
      }
    } catch {
      // No keyboard layout for this language; typing still works.
    }
  }

  async refreshTree(): Promise<void> {
    if (!this.explorer || !this.state.language) return;
    const typed = this.dom.searchBox.value.trim();
    const container = this.dom.tree;
    container.replaceChildren();
    // Expand the root plus every cached level along the typed path; only
    // uncached prefixes trigger requests, one each.
    const levels = ["", ...typedPath(typed)];
    for (const prefix of levels) {
      if (prefix !== "" && !this.explorer.isCached(prefix)) continue;
      let response;
      try {
        response = await this.explorer.expand(prefix);
      } catch {
        continue; // unknown prefix renders as an empty branch
      }
      const list = document.createElement("ul");
      list.className = "tree-level";
      for (const bucket of response.buckets ?? []) {
        if (!matchesFilter(bucket.prefix, typed)) continue;
        list.append(this.renderBucket(bucket));
      }
      for (const word of response.words ?? []) {
        if (!matchesFilter(word, typed)) continue;
        const item = document.createElement("li");
        item.className = "tree-word";
        item.textContent = word;
        item.addEventListener("click", () => void this.runLookup(word));
        list.append(item);
      }
      if (list.childElementCount > 0) container.append(list);
    }
  }

  private renderBucket(bucket: BucketInfo): HTMLLIElement {
    const item = document.createElement("li");
    item.className = bucket.terminal ? "tree-node terminal" : "tree-node";
    item.textContent = `${bucket.prefix} (${bucket.count})`;
    item.addEventListener("click", async (event) => {
      event.stopPropagation();
      if (bucket.terminal) {
        await this.runLookup(bucket.prefix);
        return;
      }
      const expansion = await this.explorer!.expand(bucket.prefix);
      const nested = document.createElement("ul");
      for (const child of expansion.buckets ?? []) {
        nested.append(this.renderBucket(child));
      }
      for (const word of expansion.words ?? []) {
        const leaf = document.createElement("li");
        leaf.className = "tree-word";
        leaf.textContent = word;
        leaf.addEventListener("click", () => void this.runLookup(word));
        nested.append(leaf);
      }
      item.replaceChildren(document.createTextNode(`${bucket.prefix} (${bucket.count})`), nested);
    });
    return item;
  }

  async runLookup(query: string): Promise<void> {
    if (!this.state.language) return;
    this.dom.searchBox.value = query;
    try {
      const response = await this.api.search(this.state.language, query);
      const pageCounts = this.state.pageCount;
      this.state = applySearchResponse({ ...this.state, pageCount: pageCounts }, response);
      this.dom.banner.replaceChildren();
    } catch (error) {
      this.showError(error, () => void this.runLookup(query));
      return;
    }
    this.renderAll();
  }

  private showError(error: unknown, retry: () => void): void {
    const banner = this.dom.banner;
    banner.replaceChildren();
    const message = error instanceof ServiceError ? `${error.code}: ${error.message}` : "Network problem";
    banner.append(document.createTextNode(message));
    const button = document.createElement("button");
    button.textContent = "Retry";
    button.addEventListener("click", retry);
    banner.append(button);
  }

  private handlers(): Handlers {
    return {
      onTab: (tab) => {
        this.state = setActiveTab(this.state, tab);
        this.renderAll();
      },
      onPage: (dictionary, page) => {
        this.state = setPage(this.state, dictionary, page);
        this.renderAll();
      },
      onZoom: (zoom) => {
        this.state = setZoom(this.state, zoom);
        this.renderAll();
      },
      onFeedback: (dictionary, page, verdict) => {
        void this.api
          .submitFeedback({
            dictionary, page, word: this.state.query, verdict, contributor: contributor(),
          })
          .then(() => this.runLookup(this.state.query))
          .catch((error) => this.showError(error, () => undefined));
      },
      onMarkerPlace: (dictionary, page, x, y) => {
        void this.api
          .submitMarker({
            dictionary, page, word: this.state.query, x, y, contributor: contributor(),
          })
          .then((ack) => {
            this.state = commitMarkerDrag(
              beginMarkerDrag(this.state, dictionary, page, this.state.query, { x, y }),
              ack,
            );
            this.renderAll();
          })
          .catch((error) => this.showError(error, () => undefined));
      },
      onMarkerDragStart: (dictionary, page, word, x, y) => {
        this.state = beginMarkerDrag(this.state, dictionary, page, word, { x, y });
      },
      onMarkerDragMove: (x, y) => {
        this.state = moveMarkerDrag(this.state, { x, y });
        this.renderAll();
      },
      onMarkerDragEnd: () => {
        const drag = this.state.markerDrag;
        if (!drag) return;
        void this.api
          .submitMarker({
            dictionary: drag.dictionary,
            page: drag.page,
            word: drag.word,
            x: drag.position.x,
            y: drag.position.y,
            contributor: contributor(),
          })
          .then((ack) => {
            // Render the server's aggregate, not the local drop point.
            this.state = commitMarkerDrag(this.state, ack);
            this.renderAll();
          })
          .catch((error) => {
            this.state = cancelMarkerDrag(this.state);
            this.showError(error, () => undefined);
            this.renderAll();
          });
      },
      onAnnotate: (dictionary, page, text) => {
        void this.api
          .submitAnnotation({
            dictionary, page, word: this.state.query, text,
            meta: { contributor: contributor() },
          })
          .then(() => this.runLookup(this.state.query))
          .catch((error) => this.showError(error, () => undefined));
      },
      onDigitize: (dictionary, fields) => {
        void this.api
          .submitDigitization({
            dictionary, word: this.state.query, fields, meta: { contributor: contributor() },
          })
          .then(() => this.runLookup(this.state.query))
          .catch((error) => this.showError(error, () => undefined));
      },
    };
  }

  renderAll(): void {
    renderTabs(this.dom.tabs, this.state, this.handlers());
    renderActiveTab(this.dom.content, this.state, this.handlers());
  }
}

export function bootstrap(): void {
  const byId = (id: string) => document.getElementById(id) as HTMLElement;
  const app = new ExplorerApp(new ApiClient(""), {
    root: document.documentElement,
    languageSelect: byId("language") as HTMLSelectElement,
    searchBox: byId("search") as HTMLInputElement,
    keyboard: byId("keyboard"),
    tree: byId("tree"),
    tabs: byId("tabs"),
    content: byId("content"),
    banner: byId("banner"),
  });
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("content")) {
  bootstrap();
}
