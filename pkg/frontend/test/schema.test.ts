import { describe, expect, it } from "vitest";

import { DEFAULT_MODEL, RequestError, parseEmbedRequest } from "../src/schema.js";

const duckText = { id: 0, kind: "text", payload: "a yellow toy duck" };
const boxedImage = {
  id: 1,
  kind: "image",
  payload: { path: "frame.png", box: { x: 2, y: 3, width: 10, height: 8 } },
};

describe("parseEmbedRequest", () => {
  it("accepts a mixed batch and fills the default model", () => {
    const req = parseEmbedRequest({ items: [duckText, boxedImage] });
    expect(req.items).toHaveLength(2);
    expect(req.model_name).toBe(DEFAULT_MODEL);
  });

  it("keeps an explicit model name", () => {
    const req = parseEmbedRequest({ items: [duckText], model_name: "hash-v1" });
    expect(req.model_name).toBe("hash-v1");
  });

  it("rejects duplicate ids and names both positions", () => {
    const doc = { items: [duckText, { ...boxedImage, id: 0 }] };
    expect(() => parseEmbedRequest(doc)).toThrow(RequestError);
    expect(() => parseEmbedRequest(doc)).toThrow(/duplicate id 0.*items\[0\]/);
  });

  it("rejects an empty item list", () => {
    expect(() => parseEmbedRequest({ items: [] })).toThrow(RequestError);
  });

  it("rejects unknown kinds", () => {
    const doc = { items: [{ id: 0, kind: "audio", payload: "quack" }] };
    expect(() => parseEmbedRequest(doc)).toThrow(RequestError);
  });

  it("rejects boxes with non-positive extent or negative origin", () => {
    for (const box of [
      { x: -1, y: 0, width: 4, height: 4 },
      { x: 0, y: 0, width: 0, height: 4 },
      { x: 0, y: 0, width: 4, height: -2 },
    ]) {
      const doc = {
        items: [{ id: 0, kind: "image", payload: { path: "frame.png", box } }],
      };
      expect(() => parseEmbedRequest(doc)).toThrow(RequestError);
    }
  });

  it("rejects text items with object payloads and vice versa", () => {
    expect(() =>
      parseEmbedRequest({ items: [{ id: 0, kind: "text", payload: { path: "x" } }] })
    ).toThrow(RequestError);
    expect(() =>
      parseEmbedRequest({ items: [{ id: 0, kind: "image", payload: "frame.png" }] })
    ).toThrow(RequestError);
  });
});
