import { writeFileSync } from "node:fs";

export interface WrittenTable {
  jsonPath: string;
  binPath: string;
  count: number;
  dim: number;
}

/**
 * Write an embedding table in the localization package's on-disk layout:
 * a JSON header `{count, dim, ids}` next to a `.bin` sidecar holding the
 * vectors as little-endian float32 rows, row order matching `ids` sorted
 * ascending.
 *
 * Rows are L2-normalized in double precision immediately before the
 * float32 cast so the stored norms stay well inside the reader's 1e-6
 * unit-norm tolerance.
 */
export function writeEmbeddingTable(
  outBase: string,
  ids: number[],
  vectors: number[][]
): WrittenTable {
  if (ids.length !== vectors.length) {
    throw new Error(`${ids.length} ids for ${vectors.length} vectors`);
  }
  if (ids.length === 0) {
    throw new Error("refusing to write an empty embedding table");
  }
  if (new Set(ids).size !== ids.length) {
    throw new Error("embedding ids must be unique");
  }
  const dim = vectors[0].length;
  for (const row of vectors) {
    if (row.length !== dim) {
      throw new Error(`ragged rows: expected dim ${dim}, got ${row.length}`);
    }
  }

  const order = ids.map((_, i) => i).sort((a, b) => ids[a] - ids[b]);

  const payload = new ArrayBuffer(ids.length * dim * 4);
  const view = new DataView(payload);
  let offset = 0;
  for (const src of order) {
    const row = vectors[src];
    let norm = 0;
    for (const v of row) norm += v * v;
    norm = Math.sqrt(norm);
    if (norm === 0) {
      throw new Error(`cannot write zero-norm embedding row (id ${ids[src]})`);
    }
    for (const v of row) {
      view.setFloat32(offset, v / norm, true);
      offset += 4;
    }
  }

  const base = outBase.replace(/\.(json|bin)$/, "");
  const jsonPath = `${base}.json`;
  const binPath = `${base}.bin`;
  const header = {
    count: ids.length,
    dim,
    ids: order.map((i) => ids[i]),
  };
  writeFileSync(jsonPath, JSON.stringify(header) + "\n");
  writeFileSync(binPath, Buffer.from(payload));
  return { jsonPath, binPath, count: ids.length, dim };
}
