// Transforms between source-image pixels and rendered screen pixels.
//
// The service stores every coordinate in source-image space; the client owns
// all scaling. Screen positions are device pixels (integers), so a
// round-trip loses at most half a screen pixel, i.e. ceil(0.5 / zoom) image
// pixels: one image pixel at any zoom >= 0.5.

export interface Viewport {
  zoom: number;
  offsetX: number;
  offsetY: number;
}

export function viewport(zoom: number, offsetX = 0, offsetY = 0): Viewport {
  if (zoom <= 0) throw new Error(`zoom must be positive, got ${zoom}`);
  return { zoom, offsetX, offsetY };
}

export function imageToScreen(v: Viewport, x: number, y: number): { x: number; y: number } {
  return {
    x: Math.round(x * v.zoom + v.offsetX),
    y: Math.round(y * v.zoom + v.offsetY),
  };
}

export function screenToImage(v: Viewport, x: number, y: number): { x: number; y: number } {
  return {
    x: Math.round((x - v.offsetX) / v.zoom),
    y: Math.round((y - v.offsetY) / v.zoom),
  };
}

export interface ScreenBox {
  left: number;
  top: number;
  width: number;
  height: number;
}

export function boxToScreen(
  v: Viewport,
  box: { top: number; bottom: number; left: number; right: number },
): ScreenBox {
  const topLeft = imageToScreen(v, box.left, box.top);
  const bottomRight = imageToScreen(v, box.right, box.bottom);
  return {
    left: topLeft.x,
    top: topLeft.y,
    width: Math.max(1, bottomRight.x - topLeft.x),
    height: Math.max(1, bottomRight.y - topLeft.y),
  };
}
