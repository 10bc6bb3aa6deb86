import { existsSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { readDensity, readManifest, readObservables, SchemaError } from "./csv.js";
import { renderCollapse, renderCurves, renderHeatmap, RunData } from "./panels.js";

export type PanelKind = "heatmap" | "curves" | "collapse";

export interface PlotSpec {
  kind: PanelKind;
  /** Simulator run directories (each holds manifest.json plus CSVs). */
  inputs: string[];
  /** Output image path; .svg. */
  output: string;
  observable?: string;
  tcOverTau?: number;
  xLabel?: string;
  yLabel?: string;
  title?: string;
}

const KINDS: PanelKind[] = ["heatmap", "curves", "collapse"];

export function validateSpec(spec: PlotSpec): void {
  if (!KINDS.includes(spec.kind)) {
    throw new SchemaError(`unknown panel kind ${JSON.stringify(spec.kind)}; use ${KINDS.join(", ")}`);
  }
  if (!Array.isArray(spec.inputs) || spec.inputs.length === 0) {
    throw new SchemaError("spec needs at least one input run directory");
  }
  if (spec.kind === "heatmap" && spec.inputs.length !== 1) {
    throw new SchemaError(`heatmap takes exactly one input run, got ${spec.inputs.length}`);
  }
  if (spec.kind === "collapse") {
    if (spec.inputs.length < 2) throw new SchemaError("collapse needs at least two input runs");
    if (spec.tcOverTau === undefined || !Number.isFinite(spec.tcOverTau)) {
      throw new SchemaError("collapse needs tcOverTau for the per-curve shift");
    }
  }
  if (typeof spec.output !== "string" || !spec.output.endsWith(".svg")) {
    throw new SchemaError(`output must be an .svg path, got ${JSON.stringify(spec.output)}`);
  }
  for (const dir of spec.inputs) {
    if (!existsSync(dir)) throw new SchemaError(`input run directory not found: ${dir}`);
    const files = spec.kind === "heatmap" ? ["manifest.json", "density.csv"] : ["manifest.json", "observables.csv"];
    for (const f of files) {
      if (!existsSync(join(dir, f))) throw new SchemaError(`${dir} has no ${f}`);
    }
  }
}

export function loadRun(dir: string, kind: PanelKind): RunData {
  const run: RunData = { manifest: readManifest(join(dir, "manifest.json")) };
  if (kind === "heatmap") run.density = readDensity(join(dir, "density.csv"));
  else run.observables = readObservables(join(dir, "observables.csv"));
  return run;
}

/** Render the panel a spec describes; pure function of the input files. */
export function render(spec: PlotSpec): string {
  validateSpec(spec);
  const runs = spec.inputs.map((dir) => loadRun(dir, spec.kind));
  const opts = {
    observable: spec.observable,
    tcOverTau: spec.tcOverTau,
    xLabel: spec.xLabel,
    yLabel: spec.yLabel,
    title: spec.title,
  };
  if (spec.kind === "heatmap") return renderHeatmap(runs[0], opts);
  if (spec.kind === "curves") return renderCurves(runs, opts);
  return renderCollapse(runs, opts);
}

export function renderToFile(spec: PlotSpec): string {
  writeFileSync(spec.output, render(spec));
  return spec.output;
}
