/** Flat key=value job files for feature export. */

import * as fs from 'fs';

import { ExportJob } from './exporter';

/**
 * Recognized keys:
 *   clean_dir        directory of clean images (ids prefixed `clean/`)
 *   transformed_dir  repeatable; rendered trees (ids prefixed `<basename>/`)
 *   input_dir        repeatable; unprefixed ids
 *   model_dir        tfjs layers-model directory (required)
 *   layer            layer selector; empty = last hidden layer
 *   batch_size       default 32
 *   output           output CBF path (required)
 */
export function parseJobFile(filePath: string): ExportJob {
  const text = fs.readFileSync(filePath, 'utf-8');
  const inputDirs: ExportJob['inputDirs'] = [];
  let modelDir = '';
  let layerSelector = '';
  let batchSize = 32;
  let outputPath = '';
  for (const [index, rawLine] of text.split('\n').entries()) {
    const line = rawLine.trim();
    if (line === '' || line.startsWith('#')) continue;
    const eq = line.indexOf('=');
    if (eq < 0) throw new Error(`${filePath}:${index + 1}: expected key=value`);
    const key = line.slice(0, eq).trim();
    const value = line.slice(eq + 1).trim();
    switch (key) {
      case 'clean_dir':
        inputDirs.push({ dir: value, label: 'clean' });
        break;
      case 'transformed_dir':
        inputDirs.push({ dir: value, label: value.replace(/\/+$/, '').split('/').pop() });
        break;
      case 'input_dir':
        inputDirs.push({ dir: value });
        break;
      case 'model_dir':
        modelDir = value;
        break;
      case 'layer':
        layerSelector = value;
        break;
      case 'batch_size':
        batchSize = Number(value);
        break;
      case 'output':
        outputPath = value;
        break;
      default:
        throw new Error(`${filePath}:${index + 1}: unknown key '${key}'`);
    }
  }
  if (modelDir === '') throw new Error(`${filePath}: model_dir is required`);
  if (outputPath === '') throw new Error(`${filePath}: output is required`);
  if (inputDirs.length === 0) throw new Error(`${filePath}: no input directories`);
  return { inputDirs, modelDir, layerSelector, batchSize, outputPath };
}
