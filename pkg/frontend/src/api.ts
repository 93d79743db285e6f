// Typed client for the lookup service. All lookup answers come from the
// server; the client never computes exists/pages/locations itself.
//
// In-flight GET requests are deduplicated per (endpoint, params): concurrent
// callers share one network round-trip.

import type {
  AnnotationAck,
  ApiError,
  DigitizationAck,
  FeedbackAck,
  LanguageInfo,
  MarkerAck,
  PrefixResponse,
  SearchResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(public code: string, message: string) {
    super(message);
  }
}

export class ApiClient {
  private inFlight = new Map<string, Promise<unknown>>();

  constructor(
    private baseUrl: string = "",
    private fetcher: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(url: string, init?: RequestInit): Promise<T> {
    const response = await this.fetcher(this.baseUrl + url, init);
    const body = (await response.json()) as T | ApiError;
    if (!response.ok) {
      const error = body as ApiError;
      throw new ServiceError(error.code ?? "ERROR", error.message ?? response.statusText);
    }
    return body as T;
  }

  private deduped<T>(url: string): Promise<T> {
    const existing = this.inFlight.get(url);
    if (existing) return existing as Promise<T>;
    const pending = this.request<T>(url).finally(() => this.inFlight.delete(url));
    this.inFlight.set(url, pending);
    return pending;
  }

  languages(): Promise<{ languages: LanguageInfo[] }> {
    return this.deduped("/api/languages");
  }

  keyboard(code: string): Promise<{ language: string; layout: { rows: string[][] } | null }> {
    return this.deduped(`/api/languages/${encodeURIComponent(code)}/keyboard`);
  }

  search(language: string, query: string): Promise<SearchResponse> {
    const params = new URLSearchParams({ lang: language, q: query });
    return this.deduped(`/api/search?${params}`);
  }

  listPrefix(language: string, prefix: string): Promise<PrefixResponse> {
    const tail = prefix === "" ? "" : `/${encodeURIComponent(prefix)}`;
    return this.deduped(`/api/languages/${encodeURIComponent(language)}/prefix${tail}`);
  }

  private post<T>(url: string, payload: unknown): Promise<T> {
    return this.request<T>(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  submitFeedback(payload: {
    dictionary: string;
    page: number;
    word: string;
    verdict: "present" | "absent";
    contributor: string;
  }): Promise<FeedbackAck> {
    return this.post("/api/feedback", payload);
  }

  submitMarker(payload: {
    dictionary: string;
    page: number;
    word: string;
    x: number;
    y: number;
    contributor: string;
  }): Promise<MarkerAck> {
    return this.post("/api/markers", payload);
  }

  submitAnnotation(payload: {
    dictionary: string;
    page: number;
    word: string;
    text: string;
    meta?: Record<string, unknown>;
  }): Promise<AnnotationAck> {
    return this.post("/api/annotations", payload);
  }

  submitDigitization(payload: {
    dictionary: string;
    word: string;
    fields: Record<string, string>;
    boxes?: Array<{ page: number; top: number; bottom: number; left: number; right: number }>;
    meta?: Record<string, unknown>;
  }): Promise<DigitizationAck> {
    return this.post("/api/digitizations", payload);
  }
}
