/**
 * Error-table export: turn per-(corruption, severity) prediction files and
 * a label file into the measurement toolkit's tabular error format.
 *
 * Labels: CSV rows `id,label`.  Predictions: one CSV per corruption and
 * severity named `<corruption>@<severity>.csv` with rows `id,prediction`.
 * Every prediction file must cover exactly the labeled ids.
 */

import * as fs from 'fs';
import * as path from 'path';

export class AlignmentError extends Error {}

export function readIdValueCsv(filePath: string): Map<string, string> {
  const out = new Map<string, string>();
  const text = fs.readFileSync(filePath, 'utf-8');
  for (const [index, rawLine] of text.split('\n').entries()) {
    const line = rawLine.trim();
    if (line === '' || line.startsWith('#') || line === 'id,label' || line === 'id,prediction') {
      continue;
    }
    const comma = line.indexOf(',');
    if (comma < 0) {
      throw new Error(`${filePath}:${index + 1}: expected id,value`);
    }
    const id = line.slice(0, comma).trim();
    if (out.has(id)) {
      throw new AlignmentError(`${filePath}: duplicate id ${id}`);
    }
    out.set(id, line.slice(comma + 1).trim());
  }
  return out;
}

export function topOneErrorPercent(
  predictions: Map<string, string>,
  labels: Map<string, string>
): number {
  if (predictions.size !== labels.size) {
    throw new AlignmentError(
      `prediction/label count mismatch: ${predictions.size} vs ${labels.size}`
    );
  }
  let wrong = 0;
  for (const [id, label] of labels) {
    const pred = predictions.get(id);
    if (pred === undefined) {
      throw new AlignmentError(`missing prediction for id ${id}`);
    }
    if (pred !== label) wrong += 1;
  }
  return (100 * wrong) / labels.size;
}

export interface ErrorTableEntry {
  corruption: string;
  severity: number;
  error: number;
}

export function exportErrorTable(
  predictionsDir: string,
  labelsPath: string,
  outputPath: string,
  baseline = ''
): ErrorTableEntry[] {
  const labels = readIdValueCsv(labelsPath);
  const files = fs
    .readdirSync(predictionsDir)
    .filter((name) => name.endsWith('.csv'))
    .sort();
  const entries: ErrorTableEntry[] = [];
  for (const name of files) {
    const stem = name.slice(0, -4);
    const at = stem.lastIndexOf('@');
    if (at < 1) {
      throw new Error(`prediction file ${name} is not named <corruption>@<severity>.csv`);
    }
    const corruption = stem.slice(0, at);
    const severity = Number(stem.slice(at + 1));
    if (!Number.isInteger(severity)) {
      throw new Error(`prediction file ${name} has a non-integer severity`);
    }
    const predictions = readIdValueCsv(path.join(predictionsDir, name));
    entries.push({
      corruption,
      severity,
      error: topOneErrorPercent(predictions, labels),
    });
  }
  const lines: string[] = [];
  if (baseline !== '') lines.push(`# baseline: ${baseline}`);
  lines.push('corruption,severity,error');
  for (const e of entries) {
    lines.push(`${e.corruption},${e.severity},${e.error}`);
  }
  fs.writeFileSync(outputPath, lines.join('\n') + '\n');
  return entries;
}
