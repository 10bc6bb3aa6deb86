#!/usr/bin/env node
import { readFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { SchemaError } from "./csv.js";
import { PanelKind, PlotSpec, renderToFile } from "./spec.js";

const USAGE = `usage:
  figure-kit <spec.json>
  figure-kit --kind heatmap|curves|collapse --input DIR [--input DIR ...]
             --output FILE.svg [--observable NAME] [--t-c VALUE]
             [--title TEXT] [--x-label TEXT] [--y-label TEXT]

The spec file holds the same fields as the flags:
  {"kind": "collapse", "inputs": ["runs/L32", "runs/L48"],
   "output": "collapse.svg", "tcOverTau": 0.79}`;

export function parseArgs(argv: string[]): PlotSpec {
  if (argv.length === 0) throw new SchemaError(USAGE);
  if (!argv[0].startsWith("--")) {
    if (argv.length > 1) throw new SchemaError("a spec file takes no further arguments");
    return JSON.parse(readFileSync(argv[0], "utf8")) as PlotSpec;
  }
  const spec: Partial<PlotSpec> & { inputs: string[] } = { inputs: [] };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new SchemaError(`${flag} needs a value`);
    switch (flag) {
      case "--kind":
        spec.kind = value as PanelKind;
        break;
      case "--input":
        spec.inputs.push(value);
        break;
      case "--output":
        spec.output = value;
        break;
      case "--observable":
        spec.observable = value;
        break;
      case "--t-c":
        spec.tcOverTau = Number(value);
        break;
      case "--title":
        spec.title = value;
        break;
      case "--x-label":
        spec.xLabel = value;
        break;
      case "--y-label":
        spec.yLabel = value;
        break;
      default:
        throw new SchemaError(`unknown flag ${flag}\n${USAGE}`);
    }
  }
  return spec as PlotSpec;
}

export function main(argv: string[]): number {
  try {
    const out = renderToFile(parseArgs(argv));
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
}

if (import.meta.url === pathToFileURL(process.argv[1] ?? "").href) {
  process.exit(main(process.argv.slice(2)));
}
