/** PNG loading and directory walking for embedding jobs. */

import * as fs from 'fs';
import * as path from 'path';
import { PNG } from 'pngjs';

export interface RgbImage {
  width: number;
  height: number;
  /** HWC float32 in [0, 1] */
  data: Float32Array;
}

export function loadPng(filePath: string): RgbImage {
  const png = PNG.sync.read(fs.readFileSync(filePath));
  const { width, height } = png;
  const data = new Float32Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    data[i * 3 + 0] = png.data[i * 4 + 0] / 255;
    data[i * 3 + 1] = png.data[i * 4 + 1] / 255;
    data[i * 3 + 2] = png.data[i * 4 + 2] / 255;
  }
  return { width, height, data };
}

/** Relative paths of all PNGs under a root, lexicographic (the id order). */
export function listImages(root: string): string[] {
  if (!fs.existsSync(root) || !fs.statSync(root).isDirectory()) {
    throw new Error(`not a directory: ${root}`);
  }
  const out: string[] = [];
  const walk = (dir: string) => {
    for (const entry of fs.readdirSync(dir, { withFileTypes: true })) {
      const full = path.join(dir, entry.name);
      if (entry.isDirectory()) {
        walk(full);
      } else if (entry.name.toLowerCase().endsWith('.png')) {
        out.push(path.relative(root, full).split(path.sep).join('/'));
      }
    }
  };
  walk(root);
  return out.sort();
}
