import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { writeEmbeddingTable } from "../src/writer.js";
import { norm, tempDir } from "./helpers.js";

function readRows(binPath: string, count: number, dim: number): number[][] {
  const raw = readFileSync(binPath);
  expect(raw.length).toBe(count * dim * 4);
  const rows: number[][] = [];
  for (let r = 0; r < count; r++) {
    const row: number[] = [];
    for (let c = 0; c < dim; c++) {
      row.push(raw.readFloatLE((r * dim + c) * 4));
    }
    rows.push(row);
  }
  return rows;
}

describe("writeEmbeddingTable", () => {
  it("writes the header and a little-endian float32 sidecar", () => {
    const dir = tempDir();
    const out = writeEmbeddingTable(join(dir, "embeds"), [7, 3], [
      [1, 0, 0],
      [0, 2, 0],
    ]);
    const header = JSON.parse(readFileSync(out.jsonPath, "utf8"));
    expect(header).toEqual({ count: 2, dim: 3, ids: [3, 7] });
    // rows follow the sorted ids: id 3 first, normalized
    const rows = readRows(out.binPath, 2, 3);
    expect(rows[0]).toEqual([0, 1, 0]);
    expect(rows[1]).toEqual([1, 0, 0]);
  });

  it("normalizes before the float32 cast, inside the 1e-6 tolerance", () => {
    const dir = tempDir();
    const vec = Array.from({ length: 768 }, (_, i) => Math.sin(i + 1) * 3.7);
    const out = writeEmbeddingTable(join(dir, "embeds"), [0], [vec]);
    const [row] = readRows(out.binPath, 1, 768);
    expect(Math.abs(norm(row) - 1)).toBeLessThan(1e-6);
  });

  it("strips a .json or .bin suffix from the base name", () => {
    const dir = tempDir();
    const out = writeEmbeddingTable(join(dir, "embeds.json"), [1], [[0, 1]]);
    expect(out.jsonPath).toBe(join(dir, "embeds.json"));
    expect(out.binPath).toBe(join(dir, "embeds.bin"));
  });

  it("rejects empty tables, ragged rows, duplicates and zero rows", () => {
    const dir = tempDir();
    const base = join(dir, "embeds");
    expect(() => writeEmbeddingTable(base, [], [])).toThrow(/empty/);
    expect(() => writeEmbeddingTable(base, [1, 2], [[1, 0], [1]])).toThrow(/ragged/);
    expect(() => writeEmbeddingTable(base, [1, 1], [[1, 0], [0, 1]])).toThrow(/unique/);
    expect(() => writeEmbeddingTable(base, [1], [[0, 0]])).toThrow(/zero-norm/);
  });
});
