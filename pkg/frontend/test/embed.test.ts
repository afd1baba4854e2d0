import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { embedBatch } from "../src/embed.js";
import { HashEncoder } from "../src/encoder.js";
import { parseEmbedRequest } from "../src/schema.js";
import { tempDir, writePng } from "./helpers.js";

describe("embedBatch", () => {
  it("embeds a mixed batch and keeps ids aligned with rows", async () => {
    const dir = tempDir();
    const frame = writePng(join(dir, "frame.png"), 24, 24);
    const req = parseEmbedRequest({
      model_name: "hash-v1",
      items: [
        { id: 10, kind: "text", payload: "desk" },
        { id: 4, kind: "image", payload: { path: frame, box: { x: 0, y: 0, width: 12, height: 12 } } },
        { id: 2, kind: "text", payload: "plant" },
      ],
    });
    const enc = new HashEncoder(16);
    const result = await embedBatch(req, enc, { warn: () => {} });
    expect(result.skipped).toEqual([]);
    expect(result.ids).toHaveLength(3);
    expect(new Set(result.ids)).toEqual(new Set([10, 4, 2]));
    // each id's row matches a direct encode of the same payload
    const [desk] = await enc.embedTexts(["desk"]);
    expect(result.vectors[result.ids.indexOf(10)]).toEqual(desk);
  });

  it("skips out-of-bounds crops with a warning and keeps the rest", async () => {
    const dir = tempDir();
    const frame = writePng(join(dir, "frame.png"), 16, 16);
    const req = parseEmbedRequest({
      items: [
        { id: 0, kind: "text", payload: "desk" },
        { id: 1, kind: "image", payload: { path: frame, box: { x: 8, y: 8, width: 16, height: 4 } } },
        { id: 2, kind: "image", payload: { path: frame, box: { x: 0, y: 0, width: 16, height: 16 } } },
      ],
    });
    const warnings: string[] = [];
    const result = await embedBatch(req, new HashEncoder(8), {
      warn: (m) => warnings.push(m),
    });
    expect(result.skipped).toHaveLength(1);
    expect(result.skipped[0].id).toBe(1);
    expect(result.skipped[0].reason).toMatch(/exceeds image 16x16/);
    expect(warnings).toHaveLength(1);
    expect(new Set(result.ids)).toEqual(new Set([0, 2]));
  });

  it("propagates missing image files instead of skipping them", async () => {
    const req = parseEmbedRequest({
      items: [
        { id: 0, kind: "image", payload: { path: "/nonexistent.png", box: { x: 0, y: 0, width: 1, height: 1 } } },
      ],
    });
    await expect(embedBatch(req, new HashEncoder(8))).rejects.toThrow(/ENOENT/);
  });

  it("chunks work across batches without changing results", async () => {
    const labels = ["a", "b", "c", "d", "e"];
    const req = parseEmbedRequest({
      items: labels.map((payload, id) => ({ id, kind: "text", payload })),
    });
    const enc = new HashEncoder(8);
    const small = await embedBatch(req, enc, { batchSize: 2 });
    const large = await embedBatch(req, enc, { batchSize: 100 });
    expect(small.ids).toEqual(large.ids);
    expect(small.vectors).toEqual(large.vectors);
  });

  it("rejects a non-positive batch size", async () => {
    const req = parseEmbedRequest({ items: [{ id: 0, kind: "text", payload: "x" }] });
    await expect(embedBatch(req, new HashEncoder(8), { batchSize: 0 })).rejects.toThrow(
      RangeError
    );
  });
});
