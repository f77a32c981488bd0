#!/usr/bin/env node
/**
 * exporter CLI:
 *   export-features --job <file>
 *   export-error-table --predictions <dir> --labels <file> --output <file> [--baseline <tag>]
 */

import { exportFeatures } from './exporter';
import { exportErrorTable } from './errorTable';
import { parseJobFile } from './jobfile';

function getFlag(argv: string[], name: string): string | undefined {
  const idx = argv.indexOf(`--${name}`);
  return idx >= 0 && idx + 1 < argv.length ? argv[idx + 1] : undefined;
}

async function main(argv: string[]): Promise<number> {
  const command = argv[0];
  if (command === 'export-features') {
    const jobPath = getFlag(argv, 'job');
    if (!jobPath) {
      console.error('usage: export-features --job <file>');
      return 2;
    }
    const job = parseJobFile(jobPath);
    const result = await exportFeatures(job);
    console.log(
      `wrote ${result.rowCount} rows (dim ${result.dim}, ` +
        `fingerprint ${result.fingerprint}) to ${job.outputPath}`
    );
    return 0;
  }
  if (command === 'export-error-table') {
    const predictions = getFlag(argv, 'predictions');
    const labels = getFlag(argv, 'labels');
    const output = getFlag(argv, 'output');
    if (!predictions || !labels || !output) {
      console.error(
        'usage: export-error-table --predictions <dir> --labels <file> --output <file>'
      );
      return 2;
    }
    const entries = exportErrorTable(
      predictions,
      labels,
      output,
      getFlag(argv, 'baseline') ?? ''
    );
    console.log(`wrote ${entries.length} error rows to ${output}`);
    return 0;
  }
  console.error('commands: export-features, export-error-table');
  return 2;
}

main(process.argv.slice(2)).then(
  (code) => process.exit(code),
  (err) => {
    console.error(`error: ${err.message ?? err}`);
    process.exit(1);
  }
);
