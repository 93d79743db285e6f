// Language-sensitive on-screen keyboard; layouts are data, not code.

export interface KeyboardLayout {
  rows: string[][];
}

export function isRTL(direction: string | null | undefined): boolean {
  return direction === "rtl";
}

export function pressKey(query: string, key: string): string {
  if (key === "⌫") return query.slice(0, -1);
  if (key === "␣") return query + " ";
  return query + key;
}

export function layoutRows(layout: KeyboardLayout | null): string[][] {
  if (!layout || !Array.isArray(layout.rows)) return [];
  return layout.rows.map((row) => [...row]);
}
