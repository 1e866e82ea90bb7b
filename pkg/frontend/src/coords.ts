/** Fixed planar layout (standard Sioux Falls node coordinates). */
export const NODE_COORDS: Record<number, [number, number]> = {
  1: [50000, 510000],
  2: [320000, 510000],
  3: [50000, 440000],
  4: [130000, 440000],
  5: [220000, 440000],
  6: [320000, 440000],
  7: [420000, 380000],
  8: [320000, 380000],
  9: [220000, 380000],
  10: [220000, 320000],
  11: [130000, 320000],
  12: [50000, 320000],
  13: [50000, 50000],
  14: [130000, 190000],
  15: [220000, 190000],
  16: [320000, 320000],
  17: [320000, 260000],
  18: [420000, 320000],
  19: [320000, 190000],
  20: [320000, 50000],
  21: [220000, 50000],
  22: [220000, 120000],
  23: [130000, 120000],
  24: [130000, 50000],
};

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

/** Scale raw plan coordinates of the given nodes into screen space. */
export function layout(
  nodes: number[],
  viewport: Viewport
): Map<number, [number, number]> {
  const pts = nodes.map((n) => NODE_COORDS[n] ?? [0, 0]);
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const spanX = Math.max(maxX - minX, 1);
  const spanY = Math.max(maxY - minY, 1);
  const w = viewport.width - 2 * viewport.margin;
  const h = viewport.height - 2 * viewport.margin;
  const out = new Map<number, [number, number]>();
  nodes.forEach((n, i) => {
    const [x, y] = pts[i];
    out.set(n, [
      viewport.margin + ((x - minX) / spanX) * w,
      // plan y grows north; screen y grows down
      viewport.margin + (1 - (y - minY) / spanY) * h,
    ]);
  });
  return out;
}
