import { cpSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it, vi } from "vitest";

import { main, parseArgs } from "../src/cli.js";
import { render, validateSpec } from "../src/spec.js";

const sample = (rel: string) => fileURLToPath(new URL(`../samples/${rel}`, import.meta.url));
const DIRS = [sample("L16"), sample("L24"), sample("L32")];

describe("spec validation", () => {
  it("rejects an unknown panel kind", () => {
    expect(() =>
      validateSpec({ kind: "scatter" as never, inputs: DIRS, output: "x.svg" })
    ).toThrowError(/unknown panel kind/);
  });

  it("rejects a heatmap over several runs", () => {
    expect(() => validateSpec({ kind: "heatmap", inputs: DIRS, output: "x.svg" })).toThrowError(
      /exactly one/
    );
  });

  it("rejects a collapse without shift or with one run", () => {
    expect(() => validateSpec({ kind: "collapse", inputs: DIRS, output: "x.svg" })).toThrowError(
      /tcOverTau/
    );
    expect(() =>
      validateSpec({ kind: "collapse", inputs: [DIRS[0]], output: "x.svg", tcOverTau: 0.79 })
    ).toThrowError(/two input runs/);
  });

  it("rejects missing run directories and non-svg outputs", () => {
    expect(() =>
      validateSpec({ kind: "curves", inputs: ["/no/such/run"], output: "x.svg" })
    ).toThrowError(/not found/);
    expect(() => validateSpec({ kind: "curves", inputs: DIRS, output: "x.png" })).toThrowError(
      /\.svg/
    );
  });
});

describe("command line", () => {
  it("renders from flags and from a spec file identically", () => {
    const dir = mkdtempSync(join(tmpdir(), "figkit-"));
    const flagOut = join(dir, "flags.svg");
    const fileOut = join(dir, "file.svg");
    const log = vi.spyOn(console, "log").mockImplementation(() => {});
    expect(
      main(["--kind", "curves", "--input", DIRS[0], "--input", DIRS[1], "--input", DIRS[2],
            "--output", flagOut, "--t-c", "0.79"])
    ).toBe(0);
    const specPath = join(dir, "spec.json");
    writeFileSync(
      specPath,
      JSON.stringify({ kind: "curves", inputs: DIRS, output: fileOut, tcOverTau: 0.79 })
    );
    expect(main([specPath])).toBe(0);
    log.mockRestore();
    expect(readFileSync(flagOut, "utf8")).toBe(readFileSync(fileOut, "utf8"));
  });

  it("fails with the offending column named on a schema mismatch", () => {
    const dir = mkdtempSync(join(tmpdir(), "figkit-"));
    const runDir = join(dir, "run");
    cpSync(DIRS[0], runDir, { recursive: true });
    const obsPath = join(runDir, "observables.csv");
    const text = readFileSync(obsPath, "utf8").replace("rescaled_time", "scaled_time");
    writeFileSync(obsPath, text);
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["--kind", "curves", "--input", runDir, "--output", join(dir, "x.svg")])).toBe(1);
    expect(err.mock.calls.map(String).join("\n")).toMatch(/rescaled_time/);
    err.mockRestore();
  });

  it("rejects unknown flags and trailing arguments", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(main(["--whatever", "x"])).toBe(1);
    expect(main([])).toBe(1);
    err.mockRestore();
    expect(() => parseArgs(["spec.json", "extra"])).toThrowError(/no further/);
  });
});

it("curves render even without the optional annotation", () => {
  const svg = render({ kind: "curves", inputs: [DIRS[0]], output: "x.svg" });
  expect(svg).toContain("L = 16");
  expect(svg).not.toContain("t_c/τ");
});
