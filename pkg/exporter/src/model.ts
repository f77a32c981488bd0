/**
 * Local model loading and hidden-layer embedding.
 *
 * Models are tfjs layers-model directories (model.json + weight shards)
 * resolved from the local filesystem only; no network fetch.  The layer
 * selector names which activation becomes the feature space:
 *   - "" (default): the layer feeding the final one, i.e. the last hidden
 *     layer, taken post-activation
 *   - a layer name: that layer's output
 * Inference runs in evaluation mode (tfjs layers apply no dropout or
 * batch-norm updates at predict time).
 */

import * as crypto from 'crypto';
import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';

import { RgbImage } from './images';

export class ModelResolutionError extends Error {}

export interface EmbeddingModel {
  model: tf.LayersModel;
  truncated: tf.LayersModel;
  fingerprint: string;
  dim: number;
}

async function loadLayersModelFromDir(modelDir: string): Promise<tf.LayersModel> {
  const jsonPath = path.join(modelDir, 'model.json');
  if (!fs.existsSync(jsonPath)) {
    throw new ModelResolutionError(`model weights not found: ${jsonPath}`);
  }
  const spec = JSON.parse(fs.readFileSync(jsonPath, 'utf-8'));
  const manifest = spec.weightsManifest ?? [];
  const weightSpecs: tf.io.WeightsManifestEntry[] = [];
  const buffers: Buffer[] = [];
  for (const group of manifest) {
    weightSpecs.push(...group.weights);
    for (const relPath of group.paths) {
      const shard = path.join(modelDir, relPath);
      if (!fs.existsSync(shard)) {
        throw new ModelResolutionError(`missing weight shard: ${shard}`);
      }
      buffers.push(fs.readFileSync(shard));
    }
  }
  const weightData = Buffer.concat(buffers);
  return tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: spec.modelTopology,
      weightSpecs,
      weightData: weightData.buffer.slice(
        weightData.byteOffset,
        weightData.byteOffset + weightData.byteLength
      ),
    })
  );
}

function pickLayer(model: tf.LayersModel, selector: string): tf.layers.Layer {
  if (selector === '') {
    if (model.layers.length < 2) {
      throw new ModelResolutionError('model has no hidden layer to select');
    }
    return model.layers[model.layers.length - 2];
  }
  const layer = model.layers.find((l) => l.name === selector);
  if (!layer) {
    const names = model.layers.map((l) => l.name).join(', ');
    throw new ModelResolutionError(`no layer named '${selector}' (have: ${names})`);
  }
  return layer;
}

/** Fingerprint identifies (weights, layer): hash of the weight bytes + selector. */
function modelFingerprint(modelDir: string, layerName: string): string {
  const hash = crypto.createHash('sha256');
  hash.update(fs.readFileSync(path.join(modelDir, 'model.json')));
  for (const entry of fs.readdirSync(modelDir).sort()) {
    if (entry.endsWith('.bin')) {
      hash.update(fs.readFileSync(path.join(modelDir, entry)));
    }
  }
  hash.update(layerName);
  return `cnn/${hash.digest('hex').slice(0, 16)}`;
}

export async function loadEmbeddingModel(
  modelDir: string,
  layerSelector = ''
): Promise<EmbeddingModel> {
  const model = await loadLayersModelFromDir(modelDir);
  const layer = pickLayer(model, layerSelector);
  const truncated = tf.model({
    inputs: model.inputs,
    outputs: layer.output as tf.SymbolicTensor,
  });
  const outShape = layer.outputShape as number[];
  const dim = outShape.slice(1).reduce((a, b) => a * (b ?? 1), 1);
  return {
    model,
    truncated,
    fingerprint: modelFingerprint(modelDir, layer.name),
    dim,
  };
}

/** Embed a batch of same-sized images; returns one flat vector per image. */
export function embedBatch(embedder: EmbeddingModel, images: RgbImage[]): Float32Array[] {
  if (images.length === 0) return [];
  const { width, height } = images[0];
  for (const img of images) {
    if (img.width !== width || img.height !== height) {
      throw new Error('all images in a batch must share dimensions');
    }
  }
  const flat = new Float32Array(images.length * height * width * 3);
  images.forEach((img, i) => flat.set(img.data, i * height * width * 3));
  const output = tf.tidy(() => {
    const input = tf.tensor4d(flat, [images.length, height, width, 3]);
    const result = embedder.truncated.predict(input, { batchSize: images.length });
    return (Array.isArray(result) ? result[0] : result).reshape([images.length, -1]);
  });
  const values = output.dataSync() as Float32Array;
  const dim = output.shape[1] as number;
  output.dispose();
  if (dim !== embedder.dim) {
    throw new Error(`feature dim drift: expected ${embedder.dim}, got ${dim}`);
  }
  const rows: Float32Array[] = [];
  for (let i = 0; i < images.length; i++) {
    rows.push(values.slice(i * dim, (i + 1) * dim));
  }
  return rows;
}
