/**
 * Feature export jobs: embed directories of clean/rendered images with a
 * local convolutional model's hidden layer and write `CBF1` files keyed by
 * relative path.  The exporter never transforms pixels itself; it embeds
 * exactly the files it is given.
 */

import * as path from 'path';

import { FeatureRow, writeFeatureFile } from './cbf';
import { listImages, loadPng } from './images';
import { EmbeddingModel, embedBatch, loadEmbeddingModel } from './model';

export interface ExportJob {
  /** directories to embed; ids are `<dirLabel>/<relative path>` when labeled */
  inputDirs: { dir: string; label?: string }[];
  modelDir: string;
  layerSelector: string;
  batchSize: number;
  outputPath: string;
}

export interface ExportResult {
  rowCount: number;
  dim: number;
  fingerprint: string;
}

export async function exportFeatures(job: ExportJob): Promise<ExportResult> {
  if (job.batchSize < 1) throw new Error('batch size must be >= 1');
  const embedder: EmbeddingModel = await loadEmbeddingModel(
    job.modelDir,
    job.layerSelector
  );
  const rows: FeatureRow[] = [];
  for (const { dir, label } of job.inputDirs) {
    const ids = listImages(dir);
    for (let start = 0; start < ids.length; start += job.batchSize) {
      const chunk = ids.slice(start, start + job.batchSize);
      const images = chunk.map((rel) => loadPng(path.join(dir, rel)));
      const vectors = embedBatch(embedder, images);
      chunk.forEach((rel, i) => {
        rows.push({ id: label ? `${label}/${rel}` : rel, vector: vectors[i] });
      });
    }
  }
  writeFeatureFile(job.outputPath, rows, embedder.fingerprint);
  return { rowCount: rows.length, dim: embedder.dim, fingerprint: embedder.fingerprint };
}
