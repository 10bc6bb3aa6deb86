import { DensityTable, ObservablesTable, RunManifest, SchemaError } from "./csv.js";
import { sizeColor, viridis } from "./color.js";
import { extent, linearScale, niceTicks, Scale } from "./scale.js";
import { el, fmt, fmtTick, svgDocument } from "./svg.js";

export interface RunData {
  manifest: RunManifest;
  observables?: ObservablesTable;
  density?: DensityTable;
}

export interface PanelGeometry {
  width: number;
  height: number;
  marginLeft: number;
  marginRight: number;
  marginTop: number;
  marginBottom: number;
}

export const DEFAULT_GEOMETRY: PanelGeometry = {
  width: 560,
  height: 400,
  marginLeft: 64,
  marginRight: 100,
  marginTop: 34,
  marginBottom: 50,
};

export interface PanelOptions {
  observable?: string;
  tcOverTau?: number;
  xLabel?: string;
  yLabel?: string;
  title?: string;
  geometry?: PanelGeometry;
}

const AXIS_FONT = 12;
const TICK_LEN = 5;

function frame(x: Scale, y: Scale, g: PanelGeometry, xLabel: string, yLabel: string, title: string): string {
  const [x0, x1] = x.range;
  const [y1, y0] = [y.range[0], y.range[1]]; // y range is [bottom, top]
  let out = el("rect", {
    x: fmt(x0),
    y: fmt(y0),
    width: fmt(x1 - x0),
    height: fmt(y1 - y0),
    fill: "none",
    stroke: "#000",
    "stroke-width": 1,
  });
  for (const t of niceTicks(x.domain[0], x.domain[1], 6)) {
    const px = x(t);
    out += el("line", { x1: fmt(px), y1: fmt(y1), x2: fmt(px), y2: fmt(y1 + TICK_LEN), stroke: "#000" });
    out += el(
      "text",
      { x: fmt(px), y: fmt(y1 + TICK_LEN + AXIS_FONT), "text-anchor": "middle", "font-size": AXIS_FONT },
      fmtTick(t)
    );
  }
  for (const t of niceTicks(y.domain[0], y.domain[1], 6)) {
    const py = y(t);
    out += el("line", { x1: fmt(x0 - TICK_LEN), y1: fmt(py), x2: fmt(x0), y2: fmt(py), stroke: "#000" });
    out += el(
      "text",
      {
        x: fmt(x0 - TICK_LEN - 3),
        y: fmt(py + AXIS_FONT / 3),
        "text-anchor": "end",
        "font-size": AXIS_FONT,
      },
      fmtTick(t)
    );
  }
  const cx = (x0 + x1) / 2;
  out += el(
    "text",
    { x: fmt(cx), y: fmt(y1 + 40), "text-anchor": "middle", "font-size": AXIS_FONT + 2 },
    xLabel
  );
  out += el(
    "text",
    {
      x: fmt(x0 - 48),
      y: fmt((y0 + y1) / 2),
      "text-anchor": "middle",
      "font-size": AXIS_FONT + 2,
      transform: `rotate(-90 ${fmt(x0 - 48)} ${fmt((y0 + y1) / 2)})`,
    },
    yLabel
  );
  if (title) {
    out += el(
      "text",
      { x: fmt(cx), y: fmt(y0 - 12), "text-anchor": "middle", "font-size": AXIS_FONT + 2 },
      title
    );
  }
  return out;
}

function polyline(xs: number[], ys: number[], x: Scale, y: Scale): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) pts.push(`${fmt(x(xs[i]))},${fmt(y(ys[i]))}`);
  return pts.join(" ");
}

/** Closed band polygon following mean+stderr forward and mean-stderr back. */
function bandPoints(xs: number[], mean: number[], err: number[], x: Scale, y: Scale): string {
  const fwd: string[] = [];
  const back: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    fwd.push(`${fmt(x(xs[i]))},${fmt(y(mean[i] + err[i]))}`);
    back.push(`${fmt(x(xs[i]))},${fmt(y(mean[i] - err[i]))}`);
  }
  return fwd.concat(back.reverse()).join(" ");
}

function pickObservable(run: RunData, name: string) {
  const table = run.observables;
  if (!table) throw new SchemaError("run has no observables table");
  const series = table.observables.get(name);
  if (!series) {
    throw new SchemaError(
      `observables.csv does not provide column ${name}_mean (has: ${[...table.observables.keys()].join(", ")})`
    );
  }
  return series;
}

const byL = (a: RunData, b: RunData) => a.manifest.params.L - b.manifest.params.L;

/** Cell boundaries at midpoints between sample positions. */
function binEdges(centers: number[]): number[] {
  const edges = [centers[0]];
  for (let i = 1; i < centers.length; i++) edges.push((centers[i - 1] + centers[i]) / 2);
  edges.push(centers[centers.length - 1]);
  return edges;
}

/** Site-resolved mean density as site index vs rescaled time. */
export function renderHeatmap(run: RunData, opts: PanelOptions = {}): string {
  const density = run.density;
  if (!density) throw new SchemaError("heatmap needs a density table");
  const { L, J } = run.manifest.params;
  if (density.sites !== L) {
    throw new SchemaError(`density.csv has ${density.sites} site columns, manifest says L = ${L}`);
  }
  const g = opts.geometry ?? DEFAULT_GEOMETRY;
  const tau = L / J;
  const rescaled = density.time.map((t) => t / tau);
  const x = linearScale([rescaled[0], rescaled[rescaled.length - 1]], [g.marginLeft, g.width - g.marginRight]);
  const y = linearScale([0.5, L + 0.5], [g.height - g.marginBottom, g.marginTop]);
  const xEdges = binEdges(rescaled);

  let cells = "";
  for (let ti = 0; ti < rescaled.length; ti++) {
    const px = x(xEdges[ti]);
    const pw = x(xEdges[ti + 1]) - px;
    for (let si = 0; si < L; si++) {
      const pyTop = y(si + 1.5);
      const ph = y(si + 0.5) - pyTop;
      cells += el("rect", {
        x: fmt(px),
        y: fmt(pyTop),
        width: fmt(pw + 0.01),
        height: fmt(ph + 0.01),
        fill: viridis(density.values[ti][si]),
        "shape-rendering": "crispEdges",
      });
    }
  }

  // colorbar for the fixed density range [0, 1]
  const barX = g.width - g.marginRight + 24;
  const barTop = g.marginTop;
  const barH = g.height - g.marginTop - g.marginBottom;
  let stops = "";
  for (let i = 0; i <= 10; i++) {
    stops += el("stop", { offset: `${i * 10}%`, "stop-color": viridis(1 - i / 10) });
  }
  let bar = `<defs><linearGradient id="cbar" x1="0" y1="0" x2="0" y2="1">${stops}</linearGradient></defs>`;
  bar += el("rect", {
    x: fmt(barX),
    y: fmt(barTop),
    width: 14,
    height: fmt(barH),
    fill: "url(#cbar)",
    stroke: "#000",
  });
  for (const v of [0, 0.5, 1]) {
    bar += el(
      "text",
      {
        x: fmt(barX + 18),
        y: fmt(barTop + (1 - v) * barH + AXIS_FONT / 3),
        "font-size": AXIS_FONT,
      },
      fmtTick(v)
    );
  }
  bar += el(
    "text",
    { x: fmt(barX + 7), y: fmt(barTop - 8), "text-anchor": "middle", "font-size": AXIS_FONT },
    "density"
  );

  const body =
    cells +
    frame(x, y, g, opts.xLabel ?? "t/τ", opts.yLabel ?? "site", opts.title ?? `L = ${L}`) +
    bar;
  return svgDocument(g.width, g.height, body);
}

interface CurveSeries {
  label: string;
  color: string;
  xs: number[];
  mean: number[];
  stderr: number[];
}

function curvePanel(
  series: CurveSeries[],
  g: PanelGeometry,
  xLabel: string,
  yLabel: string,
  title: string,
  vline?: { at: number; label: string }
): string {
  const xLo = Math.min(...series.map((s) => extent(s.xs)[0]));
  const xHi = Math.max(...series.map((s) => extent(s.xs)[1]));
  const yHi = Math.max(...series.map((s) => extent(s.mean.map((m, i) => m + s.stderr[i]))[1]));
  const x = linearScale([xLo, xHi], [g.marginLeft, g.width - g.marginRight]);
  const y = linearScale([0, yHi * 1.06], [g.height - g.marginBottom, g.marginTop]);

  let body = "";
  for (const s of series) {
    body += el("polygon", {
      points: bandPoints(s.xs, s.mean, s.stderr, x, y),
      fill: s.color,
      "fill-opacity": 0.18,
      stroke: "none",
    });
  }
  for (const s of series) {
    body += el("polyline", {
      points: polyline(s.xs, s.mean, x, y),
      fill: "none",
      stroke: s.color,
      "stroke-width": 1.6,
    });
  }
  if (vline && vline.at >= x.domain[0] && vline.at <= x.domain[1]) {
    const px = x(vline.at);
    body += el("line", {
      x1: fmt(px),
      y1: fmt(y.range[1]),
      x2: fmt(px),
      y2: fmt(y.range[0]),
      stroke: "#444",
      "stroke-dasharray": "5,4",
    });
    body += el(
      "text",
      { x: fmt(px + 5), y: fmt(y.range[1] + 14), "font-size": AXIS_FONT, fill: "#444" },
      vline.label
    );
  }
  // legend in the right margin, one swatch per curve
  const legendX = g.width - g.marginRight + 14;
  series.forEach((s, i) => {
    const py = g.marginTop + 10 + i * 18;
    body += el("line", {
      x1: fmt(legendX),
      y1: fmt(py),
      x2: fmt(legendX + 22),
      y2: fmt(py),
      stroke: s.color,
      "stroke-width": 2,
    });
    body += el(
      "text",
      { x: fmt(legendX + 27), y: fmt(py + AXIS_FONT / 3), "font-size": AXIS_FONT },
      s.label
    );
  });
  body += frame(x, y, g, xLabel, yLabel, title);
  return svgDocument(g.width, g.height, body);
}

function observableLabel(name: string): string {
  return name === "entropy_half" ? "S̄" : name;
}

/** Mean observable vs t/τ, one curve per chain size, light-to-dark by L. */
export function renderCurves(runs: RunData[], opts: PanelOptions = {}): string {
  if (runs.length === 0) throw new SchemaError("curves panel needs at least one run");
  const name = opts.observable ?? "entropy_half";
  const sorted = [...runs].sort(byL);
  const series = sorted.map((run, i) => {
    const obs = pickObservable(run, name);
    return {
      label: `L = ${run.manifest.params.L}`,
      color: sizeColor(i, sorted.length),
      xs: run.observables!.rescaledTime,
      mean: obs.mean,
      stderr: obs.stderr,
    };
  });
  const vline =
    opts.tcOverTau !== undefined
      ? { at: opts.tcOverTau, label: `t_c/τ = ${fmtTick(opts.tcOverTau)}` }
      : undefined;
  return curvePanel(
    series,
    opts.geometry ?? DEFAULT_GEOMETRY,
    opts.xLabel ?? "t/τ",
    opts.yLabel ?? observableLabel(name),
    opts.title ?? "",
    vline
  );
}

/** Abscissa shift used by the collapse panel: t − (t_c/τ)·L, exactly. */
export function collapsedTimes(times: number[], L: number, tcOverTau: number): number[] {
  return times.map((t) => t - tcOverTau * L);
}

/** Mean observable vs t − (t_c/τ)·L; curves of all sizes align at 0. */
export function renderCollapse(runs: RunData[], opts: PanelOptions = {}): string {
  if (runs.length === 0) throw new SchemaError("collapse panel needs at least one run");
  const tc = opts.tcOverTau;
  if (tc === undefined || !Number.isFinite(tc)) {
    throw new SchemaError("collapse panel needs a finite tcOverTau");
  }
  const name = opts.observable ?? "entropy_half";
  const sorted = [...runs].sort(byL);
  const series = sorted.map((run, i) => {
    const obs = pickObservable(run, name);
    return {
      label: `L = ${run.manifest.params.L}`,
      color: sizeColor(i, sorted.length),
      xs: collapsedTimes(run.observables!.time, run.manifest.params.L, tc),
      mean: obs.mean,
      stderr: obs.stderr,
    };
  });
  return curvePanel(
    series,
    opts.geometry ?? DEFAULT_GEOMETRY,
    opts.xLabel ?? `t − (t_c/τ)L,  t_c/τ = ${fmtTick(tc)}`,
    opts.yLabel ?? observableLabel(name),
    opts.title ?? "",
    { at: 0, label: "" }
  );
}
