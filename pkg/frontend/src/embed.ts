import { CropOutOfBounds, loadCrop, type LoadedCrop } from "./crop.js";
import type { Encoder } from "./encoder.js";
import type { EmbedRequest, ImageItem, TextItem } from "./schema.js";

export interface EmbedOptions {
  /** encoder chunk size, default 16 */
  batchSize?: number;
  /** receives one line per skipped item; default: console.warn */
  warn?: (message: string) => void;
}

export interface EmbedResult {
  ids: number[];
  vectors: number[][];
  skipped: { id: number; reason: string }[];
}

function chunked<T>(items: T[], size: number): T[][] {
  const out: T[][] = [];
  for (let i = 0; i < items.length; i += size) {
    out.push(items.slice(i, i + size));
  }
  return out;
}

/**
 * Run every request item through the encoder and collect the surviving
 * rows. Items whose crop falls outside its image are skipped with a
 * warning rather than failing the batch; every other error propagates.
 */
export async function embedBatch(
  req: EmbedRequest,
  encoder: Encoder,
  options: EmbedOptions = {}
): Promise<EmbedResult> {
  const batchSize = options.batchSize ?? 16;
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new RangeError(`batchSize must be a positive integer, got ${batchSize}`);
  }
  const warn = options.warn ?? ((message: string) => console.warn(message));

  const texts = req.items.filter((it): it is TextItem => it.kind === "text");
  const images = req.items.filter((it): it is ImageItem => it.kind === "image");

  const skipped: { id: number; reason: string }[] = [];
  const crops: { id: number; crop: LoadedCrop }[] = [];
  for (const item of images) {
    try {
      crops.push({ id: item.id, crop: loadCrop(item.payload.path, item.payload.box) });
    } catch (err) {
      if (err instanceof CropOutOfBounds) {
        skipped.push({ id: item.id, reason: err.message });
        warn(`skipping item ${item.id}: ${err.message}`);
      } else {
        throw err;
      }
    }
  }

  const ids: number[] = [];
  const vectors: number[][] = [];
  for (const batch of chunked(texts, batchSize)) {
    const rows = await encoder.embedTexts(batch.map((it) => it.payload));
    batch.forEach((item, i) => {
      ids.push(item.id);
      vectors.push(rows[i]);
    });
  }
  for (const batch of chunked(crops, batchSize)) {
    const rows = await encoder.embedCrops(batch.map((entry) => entry.crop));
    batch.forEach((entry, i) => {
      ids.push(entry.id);
      vectors.push(rows[i]);
    });
  }
  return { ids, vectors, skipped };
}
