import { readFileSync } from "node:fs";

/** A CSV/JSON file does not match the simulator's documented schema. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface ObservableSeries {
  mean: number[];
  stderr: number[];
}

export interface ObservablesTable {
  comments: string[];
  time: number[];
  rescaledTime: number[];
  observables: Map<string, ObservableSeries>;
}

export interface DensityTable {
  comments: string[];
  time: number[];
  sites: number;
  /** values[timeIndex][siteIndex], site indices 0-based here. */
  values: number[][];
}

export interface RunManifest {
  version: string;
  params: {
    L: number;
    n_particles: number;
    J: number;
    delta: number;
    gamma: number;
    theta: number;
    bc: string;
    feedback: string;
    dt: number;
    t_max_over_tau: number;
  };
  master_seed: number;
  n_trajectories_kept: number;
  backend: string;
}

interface RawTable {
  comments: string[];
  header: string[];
  rows: number[][];
}

function parseTable(text: string, label: string): RawTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  const comments: string[] = [];
  let i = 0;
  while (i < lines.length && lines[i].startsWith("#")) comments.push(lines[i++]);
  if (i === lines.length) throw new SchemaError(`${label}: no header row after comments`);
  const header = lines[i++].split(",");
  const rows: number[][] = [];
  for (; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `${label}: row ${rows.length + 1} has ${cells.length} cells, header has ${header.length}`
      );
    }
    const row = cells.map(Number);
    const bad = row.findIndex((x) => !Number.isFinite(x));
    if (bad >= 0) throw new SchemaError(`${label}: non-numeric value in column ${header[bad]}`);
    rows.push(row);
  }
  if (rows.length === 0) throw new SchemaError(`${label}: no data rows`);
  return { comments, header, rows };
}

const column = (rows: number[][], j: number) => rows.map((row) => row[j]);

/** time, rescaled_time, then <name>_mean,<name>_stderr pairs. */
export function parseObservables(text: string, label = "observables.csv"): ObservablesTable {
  const { comments, header, rows } = parseTable(text, label);
  if (header[0] !== "time") {
    throw new SchemaError(`${label}: expected first column time, got ${header[0]}`);
  }
  if (header[1] !== "rescaled_time") {
    throw new SchemaError(`${label}: expected column rescaled_time, got ${header[1]}`);
  }
  const observables = new Map<string, ObservableSeries>();
  for (let j = 2; j < header.length; j += 2) {
    const name = header[j];
    if (!name.endsWith("_mean")) {
      throw new SchemaError(`${label}: expected a *_mean column, got ${name}`);
    }
    const base = name.slice(0, -"_mean".length);
    const err = header[j + 1];
    if (err !== `${base}_stderr`) {
      throw new SchemaError(
        `${label}: expected column ${base}_stderr after ${name}, got ${err ?? "nothing"}`
      );
    }
    observables.set(base, { mean: column(rows, j), stderr: column(rows, j + 1) });
  }
  return { comments, time: column(rows, 0), rescaledTime: column(rows, 1), observables };
}

/** time, then site_1 ... site_L in order. */
export function parseDensity(text: string, label = "density.csv"): DensityTable {
  const { comments, header, rows } = parseTable(text, label);
  if (header[0] !== "time") {
    throw new SchemaError(`${label}: expected first column time, got ${header[0]}`);
  }
  for (let j = 1; j < header.length; j++) {
    if (header[j] !== `site_${j}`) {
      throw new SchemaError(`${label}: expected column site_${j}, got ${header[j]}`);
    }
  }
  if (header.length < 2) throw new SchemaError(`${label}: no site columns`);
  return {
    comments,
    time: column(rows, 0),
    sites: header.length - 1,
    values: rows.map((row) => row.slice(1)),
  };
}

export const readObservables = (path: string) => parseObservables(readFileSync(path, "utf8"), path);

export const readDensity = (path: string) => parseDensity(readFileSync(path, "utf8"), path);

export function readManifest(path: string): RunManifest {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SchemaError(`${path}: ${err instanceof Error ? err.message : String(err)}`);
  }
  const manifest = doc as Record<string, unknown>;
  for (const key of ["version", "params", "master_seed", "backend"]) {
    if (!(key in manifest)) throw new SchemaError(`${path}: manifest missing ${key}`);
  }
  const params = manifest.params as Record<string, unknown>;
  for (const key of ["L", "J", "delta", "gamma", "theta", "bc"]) {
    if (!(key in params)) throw new SchemaError(`${path}: manifest params missing ${key}`);
  }
  return doc as RunManifest;
}
