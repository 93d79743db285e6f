// Lazy prefix-tree explorer with client-side caching.
//
// Expanding a node loads its children from the server once; re-expanding the
// same prefix (and concurrent expansions racing for it) reuse the cached
// result without another request. Typing in the search box filters the
// already-rendered nodes purely on the client.

import type { PrefixResponse } from "./types.js";

export type PrefixFetcher = (prefix: string) => Promise<PrefixResponse>;

export class PrefixExplorer {
  private cache = new Map<string, Promise<PrefixResponse>>();

  constructor(private fetcher: PrefixFetcher) {}

  expand(prefix: string): Promise<PrefixResponse> {
    const cached = this.cache.get(prefix);
    if (cached) return cached;
    const pending = this.fetcher(prefix).catch((error) => {
      this.cache.delete(prefix); // failed loads may be retried
      throw error;
    });
    this.cache.set(prefix, pending);
    return pending;
  }

  isCached(prefix: string): boolean {
    return this.cache.has(prefix);
  }

  invalidate(): void {
    this.cache.clear();
  }
}

// A node stays visible while the typed text and the node's prefix agree on
// their common length: ancestors of the typed path and its extensions.
export function matchesFilter(nodePrefix: string, typed: string): boolean {
  if (typed === "") return true;
  return nodePrefix.startsWith(typed) || typed.startsWith(nodePrefix);
}

// Prefixes along the typed path (e.g. "and" -> ["a", "an", "and"]), used to
// auto-expand cached levels while the user types. Unit boundaries beyond
// single characters come from the server's bucket labels, so this walks one
// character at a time and lets matchesFilter absorb multi-character units.
export function typedPath(typed: string): string[] {
  const path: string[] = [];
  for (let i = 1; i <= typed.length; i += 1) {
    path.push(typed.slice(0, i));
  }
  return path;
}
