import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';
import { PNG } from 'pngjs';

/** mulberry32: tiny deterministic PRNG for fixture weights and pixels. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** A small conv classifier with seeded weights, saved as a layers-model dir. */
export async function buildFixtureModel(dir: string, seed = 7): Promise<void> {
  const model = tf.sequential({
    layers: [
      tf.layers.conv2d({
        inputShape: [16, 16, 3],
        filters: 8,
        kernelSize: 3,
        activation: 'relu',
        padding: 'same',
      }),
      tf.layers.maxPooling2d({ poolSize: 2 }),
      tf.layers.conv2d({ filters: 12, kernelSize: 3, activation: 'relu', padding: 'same' }),
      tf.layers.globalAveragePooling2d({}),
      tf.layers.dense({ units: 24, activation: 'relu', name: 'hidden_features' }),
      tf.layers.dense({ units: 10, activation: 'softmax', name: 'classifier' }),
    ],
  });
  const rand = mulberry32(seed);
  model.setWeights(
    model.getWeights().map((w) => {
      const values = new Float32Array(w.size);
      for (let i = 0; i < w.size; i++) values[i] = (rand() - 0.5) * 0.8;
      return tf.tensor(values, w.shape);
    })
  );
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = artifacts.weightData as ArrayBuffer;
      fs.writeFileSync(path.join(dir, 'weights.bin'), Buffer.from(weightData));
      const manifest = [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }];
      fs.writeFileSync(
        path.join(dir, 'model.json'),
        JSON.stringify({
          format: 'layers-model',
          modelTopology: artifacts.modelTopology,
          weightsManifest: manifest,
        })
      );
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: 'JSON',
        },
      };
    })
  );
}

export function writePng(filePath: string, size: number, seed: number): void {
  const png = new PNG({ width: size, height: size });
  const rand = mulberry32(seed);
  for (let i = 0; i < size * size; i++) {
    png.data[i * 4 + 0] = Math.floor(rand() * 256);
    png.data[i * 4 + 1] = Math.floor(rand() * 256);
    png.data[i * 4 + 2] = Math.floor(rand() * 256);
    png.data[i * 4 + 3] = 255;
  }
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(filePath, PNG.sync.write(png));
}

/** Same pixels as writePng but with one value nudged. */
export function writePerturbedPng(filePath: string, size: number, seed: number): void {
  const png = new PNG({ width: size, height: size });
  const rand = mulberry32(seed);
  for (let i = 0; i < size * size; i++) {
    png.data[i * 4 + 0] = Math.floor(rand() * 256);
    png.data[i * 4 + 1] = Math.floor(rand() * 256);
    png.data[i * 4 + 2] = Math.floor(rand() * 256);
    png.data[i * 4 + 3] = 255;
  }
  png.data[0] = (png.data[0] + 32) % 256;
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(filePath, PNG.sync.write(png));
}
