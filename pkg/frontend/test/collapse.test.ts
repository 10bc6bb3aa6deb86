import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { collapsedTimes, renderCollapse, DEFAULT_GEOMETRY } from "../src/panels.js";
import { linearScale } from "../src/scale.js";
import { fmt } from "../src/svg.js";
import { loadRun } from "../src/spec.js";

const sample = (rel: string) => fileURLToPath(new URL(`../samples/${rel}`, import.meta.url));
const DIRS = [sample("L16"), sample("L24"), sample("L32")];
const TC = 0.79;

describe("collapse abscissa", () => {
  const runs = DIRS.map((d) => loadRun(d, "collapse"));

  it("equals the hand-shifted data exactly, per curve", () => {
    for (const run of runs) {
      const L = run.manifest.params.L;
      const times = run.observables!.time;
      const byHand = times.map((t) => t - TC * L);
      expect(collapsedTimes(times, L, TC)).toEqual(byHand);
    }
  });

  it("reaches the drawn polyline unchanged", () => {
    const svg = renderCollapse(runs, { tcOverTau: TC });

    // rebuild the panel's scales from hand-shifted data only
    const g = DEFAULT_GEOMETRY;
    const shifted = runs.map((run) =>
      run.observables!.time.map((t) => t - TC * run.manifest.params.L)
    );
    const xLo = Math.min(...shifted.map((xs) => xs[0]));
    const xHi = Math.max(...shifted.map((xs) => xs[xs.length - 1]));
    let yHi = -Infinity;
    for (const run of runs) {
      const { mean, stderr } = run.observables!.observables.get("entropy_half")!;
      for (let i = 0; i < mean.length; i++) yHi = Math.max(yHi, mean[i] + stderr[i]);
    }
    const x = linearScale([xLo, xHi], [g.marginLeft, g.width - g.marginRight]);
    const y = linearScale([0, yHi * 1.06], [g.height - g.marginBottom, g.marginTop]);

    for (let k = 0; k < runs.length; k++) {
      const { mean } = runs[k].observables!.observables.get("entropy_half")!;
      const points = shifted[k]
        .map((xv, i) => `${fmt(x(xv))},${fmt(y(mean[i]))}`)
        .join(" ");
      expect(svg).toContain(`points="${points}" fill="none"`);
    }
  });

  it("aligns all curves on a common zero marker", () => {
    const svg = renderCollapse(runs, { tcOverTau: TC });
    const g = DEFAULT_GEOMETRY;
    const shifted = runs.map((run) =>
      run.observables!.time.map((t) => t - TC * run.manifest.params.L)
    );
    const xLo = Math.min(...shifted.map((xs) => xs[0]));
    const xHi = Math.max(...shifted.map((xs) => xs[xs.length - 1]));
    const x = linearScale([xLo, xHi], [g.marginLeft, g.width - g.marginRight]);
    expect(svg).toContain(`x1="${fmt(x(0))}"`);
  });
});
