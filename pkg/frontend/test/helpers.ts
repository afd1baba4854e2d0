import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { PNG } from "pngjs";

export function tempDir(prefix = "embed-test-"): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

/** Write a solid-color PNG and return its path. */
export function writePng(
  path: string,
  width: number,
  height: number,
  rgb: [number, number, number] = [120, 180, 60]
): string {
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    png.data[i * 4] = rgb[0];
    png.data[i * 4 + 1] = rgb[1];
    png.data[i * 4 + 2] = rgb[2];
    png.data[i * 4 + 3] = 255;
  }
  writeFileSync(path, PNG.sync.write(png));
  return path;
}

export function norm(row: number[]): number {
  return Math.sqrt(row.reduce((acc, v) => acc + v * v, 0));
}

export function dot(a: number[], b: number[]): number {
  let acc = 0;
  for (let i = 0; i < a.length; i++) acc += a[i] * b[i];
  return acc;
}
