/**
 * `CBF1` feature files, bit-compatible with the measurement toolkit.
 *
 * Layout (little-endian):
 *   magic   4 bytes  "CBF1"
 *   dim     uint32
 *   count   uint32
 *   fpLen   uint16, then fpLen bytes UTF-8 fingerprint
 *   ids     count x (uint16 length + UTF-8 bytes)
 *   data    count x dim float32
 */

import * as fs from 'fs';
import * as path from 'path';

export interface FeatureRow {
  id: string;
  vector: Float32Array;
}

export const MAGIC = 'CBF1';

export function encodeFeatures(rows: FeatureRow[], fingerprint: string): Buffer {
  const dim = rows.length > 0 ? rows[0].vector.length : 0;
  for (const row of rows) {
    if (row.vector.length !== dim) {
      throw new Error(`inconsistent feature dims: ${row.vector.length} vs ${dim}`);
    }
  }
  const fp = Buffer.from(fingerprint, 'utf-8');
  if (fp.length > 0xffff) throw new Error('fingerprint too long');

  const idBuffers = rows.map((row) => {
    const id = Buffer.from(row.id, 'utf-8');
    if (id.length > 0xffff) throw new Error(`id too long: ${row.id.slice(0, 40)}`);
    const withLen = Buffer.alloc(2 + id.length);
    withLen.writeUInt16LE(id.length, 0);
    id.copy(withLen, 2);
    return withLen;
  });

  const header = Buffer.alloc(4 + 8 + 2);
  header.write(MAGIC, 0, 'ascii');
  header.writeUInt32LE(dim, 4);
  header.writeUInt32LE(rows.length, 8);
  header.writeUInt16LE(fp.length, 12);

  const data = Buffer.alloc(rows.length * dim * 4);
  rows.forEach((row, i) => {
    for (let j = 0; j < dim; j++) {
      data.writeFloatLE(row.vector[j], (i * dim + j) * 4);
    }
  });

  return Buffer.concat([header, fp, ...idBuffers, data]);
}

export function decodeFeatures(buf: Buffer): { rows: FeatureRow[]; fingerprint: string } {
  if (buf.subarray(0, 4).toString('ascii') !== MAGIC) {
    throw new Error(`bad magic: expected ${MAGIC}`);
  }
  const dim = buf.readUInt32LE(4);
  const count = buf.readUInt32LE(8);
  const fpLen = buf.readUInt16LE(12);
  let offset = 14;
  const fingerprint = buf.subarray(offset, offset + fpLen).toString('utf-8');
  offset += fpLen;
  const ids: string[] = [];
  for (let i = 0; i < count; i++) {
    const len = buf.readUInt16LE(offset);
    offset += 2;
    ids.push(buf.subarray(offset, offset + len).toString('utf-8'));
    offset += len;
  }
  if (buf.length - offset < count * dim * 4) {
    throw new Error('truncated data segment');
  }
  const rows: FeatureRow[] = ids.map((id, i) => {
    const vector = new Float32Array(dim);
    for (let j = 0; j < dim; j++) {
      vector[j] = buf.readFloatLE(offset + (i * dim + j) * 4);
    }
    return { id, vector };
  });
  return { rows, fingerprint };
}

/** Atomic write: temp file in the same directory, then rename. */
export function writeFeatureFile(filePath: string, rows: FeatureRow[], fingerprint: string): void {
  const tmp = path.join(
    path.dirname(filePath),
    `.${path.basename(filePath)}.tmp-${process.pid}`
  );
  fs.writeFileSync(tmp, encodeFeatures(rows, fingerprint));
  fs.renameSync(tmp, filePath);
}

export function readFeatureFile(filePath: string): { rows: FeatureRow[]; fingerprint: string } {
  return decodeFeatures(fs.readFileSync(filePath));
}
