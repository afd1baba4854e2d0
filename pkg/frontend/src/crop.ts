import { readFileSync } from "node:fs";
import { imageSize } from "image-size";

import type { BoundingBox } from "./schema.js";

export class CropOutOfBounds extends Error {}

export interface LoadedCrop {
  path: string;
  box: BoundingBox;
  /** raw file bytes, already read so callers never touch the path twice */
  bytes: Uint8Array;
  imageWidth: number;
  imageHeight: number;
}

/**
 * Read an image file and check that the crop rectangle sits fully inside
 * it. The request schema can only validate the box against itself, so this
 * is where the "boxes within image bounds" rule actually bites.
 */
export function loadCrop(path: string, box: BoundingBox): LoadedCrop {
  const bytes = readFileSync(path);
  const size = imageSize(bytes);
  if (!size.width || !size.height) {
    throw new CropOutOfBounds(`${path}: could not determine image dimensions`);
  }
  if (box.x + box.width > size.width || box.y + box.height > size.height) {
    throw new CropOutOfBounds(
      `${path}: box ${box.width}x${box.height}+${box.x}+${box.y} ` +
        `exceeds image ${size.width}x${size.height}`
    );
  }
  return {
    path,
    box,
    bytes,
    imageWidth: size.width,
    imageHeight: size.height,
  };
}
