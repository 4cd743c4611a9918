/**
 * Parser for the simulator's path CSV dumps.
 *
 * Format: optional `# key=value` header block, a `path_id,t,y` header row,
 * then one row per (path, node). All paths share the same time grid.
 */

export interface PathsFile {
  meta: Record<string, string>;
  /** shared time grid */
  t: number[];
  /** one row of y values per path, in path_id order */
  paths: number[][];
}

export class SchemaError extends Error {}

export function parsePathsCsv(text: string, source = "paths.csv"): PathsFile {
  const meta: Record<string, string> = {};
  const byPath = new Map<number, { t: number[]; y: number[] }>();
  let sawHeader = false;

  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) meta[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      continue;
    }
    if (!sawHeader) {
      if (line !== "path_id,t,y") {
        throw new SchemaError(`${source}: expected header "path_id,t,y", got "${line}"`);
      }
      sawHeader = true;
      continue;
    }
    const cells = line.split(",");
    if (cells.length !== 3) {
      throw new SchemaError(`${source}: expected 3 columns, got ${cells.length}: "${line}"`);
    }
    const pid = Number(cells[0]);
    const t = Number(cells[1]);
    const y = Number(cells[2]);
    if (!Number.isInteger(pid) || !Number.isFinite(t) || !Number.isFinite(y)) {
      throw new SchemaError(`${source}: malformed row "${line}"`);
    }
    let entry = byPath.get(pid);
    if (!entry) {
      entry = { t: [], y: [] };
      byPath.set(pid, entry);
    }
    entry.t.push(t);
    entry.y.push(y);
  }

  if (!sawHeader) throw new SchemaError(`${source}: missing header row`);
  if (byPath.size === 0) throw new SchemaError(`${source}: no path rows`);

  const ids = [...byPath.keys()].sort((a, b) => a - b);
  const first = byPath.get(ids[0])!;
  for (const id of ids) {
    const entry = byPath.get(id)!;
    if (entry.t.length !== first.t.length) {
      throw new SchemaError(`${source}: path ${id} has ${entry.t.length} nodes, expected ${first.t.length}`);
    }
  }
  return { meta, t: first.t, paths: ids.map((id) => byPath.get(id)!.y) };
}

/** Truncation level of a dump: the `# L=` header entry, else an L<digits> hint in the filename. */
export function truncationLevel(file: PathsFile, filename: string): number {
  if (file.meta.L !== undefined) {
    const l = Number(file.meta.L);
    if (Number.isInteger(l) && l >= 0) return l;
  }
  const m = /L(\d+)/.exec(filename);
  if (m) return Number(m[1]);
  throw new SchemaError(`${filename}: cannot determine the truncation level (no "# L=" header)`);
}
