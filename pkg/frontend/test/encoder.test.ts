import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { loadCrop } from "../src/crop.js";
import { HashEncoder } from "../src/encoder.js";
import { norm, tempDir, writePng } from "./helpers.js";

describe("HashEncoder", () => {
  it("is deterministic: the same label twice gives identical rows", async () => {
    const enc = new HashEncoder(64);
    const rows = await enc.embedTexts(["fire extinguisher", "fire extinguisher"]);
    expect(rows[0]).toEqual(rows[1]);
    const again = await enc.embedTexts(["fire extinguisher"]);
    expect(again[0]).toEqual(rows[0]);
  });

  it("separates different labels", async () => {
    const enc = new HashEncoder(64);
    const [a, b] = await enc.embedTexts(["desk", "chair"]);
    expect(a).not.toEqual(b);
  });

  it("returns unit-norm rows of the requested dim", async () => {
    for (const dim of [3, 17, 768]) {
      const enc = new HashEncoder(dim);
      const [row] = await enc.embedTexts(["plant"]);
      expect(row).toHaveLength(dim);
      expect(Math.abs(norm(row) - 1)).toBeLessThan(1e-12);
    }
  });

  it("hashes image crops by content and box", async () => {
    const dir = tempDir();
    const path = writePng(join(dir, "frame.png"), 32, 32);
    const enc = new HashEncoder(32);
    const cropA = loadCrop(path, { x: 0, y: 0, width: 16, height: 16 });
    const cropB = loadCrop(path, { x: 8, y: 8, width: 16, height: 16 });
    const [a, b] = await enc.embedCrops([cropA, cropB]);
    expect(a).not.toEqual(b);
    const [a2] = await enc.embedCrops([cropA]);
    expect(a2).toEqual(a);
  });

  it("rejects a non-positive dim", () => {
    expect(() => new HashEncoder(0)).toThrow(RangeError);
    expect(() => new HashEncoder(2.5)).toThrow(RangeError);
  });
});
