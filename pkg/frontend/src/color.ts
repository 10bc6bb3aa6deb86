type RGB = [number, number, number];

const VIRIDIS: RGB[] = [
  [68, 1, 84],
  [72, 40, 120],
  [62, 74, 137],
  [49, 104, 142],
  [38, 130, 142],
  [31, 158, 137],
  [53, 183, 121],
  [109, 205, 89],
  [180, 222, 44],
  [253, 231, 37],
];

function lerp(stops: RGB[], u: number): string {
  const x = Math.min(1, Math.max(0, u)) * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(x));
  const f = x - i;
  const c = stops[i].map((a, k) => Math.round(a + f * (stops[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

/** Density colormap for heatmap cells, u in [0, 1]. */
export const viridis = (u: number): string => lerp(VIRIDIS, u);

const SIZE_GRADIENT: RGB[] = [
  [166, 206, 227],
  [8, 48, 107],
];

/** Curve color by chain-size rank: light for the smallest, dark for the largest. */
export function sizeColor(rank: number, count: number): string {
  return lerp(SIZE_GRADIENT, count <= 1 ? 1 : rank / (count - 1));
}
