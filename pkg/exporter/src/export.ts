import { resolveEncoder } from './encoders';
import { FeatureRow, l2Normalize, renderFeatureFile } from './featureFile';
import { loadImage, RgbImage } from './images';
import { Manifest } from './manifest';

export interface ExportJob {
  readonly manifest: Manifest;
  readonly encoderName: string;
  readonly batchSize: number;
  readonly numClasses: number | null; // null: infer from labels
  readonly onError: 'fail' | 'skip';
  readonly log?: (message: string) => void;
}

export interface ExportResult {
  readonly content: string;
  readonly skipped: number;
}

function inferClasses(manifest: Manifest): number {
  let top = 1;
  for (const row of manifest.rows) {
    top = Math.max(top, row.label, row.trueLabel ?? 0);
  }
  return Math.max(2, top + 1);
}

/** Encode every manifest row and render the feature file. Output row order
 * equals manifest order for every batch size. */
export function runExport(job: ExportJob): ExportResult {
  const encoder = resolveEncoder(job.encoderName);
  const numClasses = job.numClasses ?? inferClasses(job.manifest);
  const log = job.log ?? ((message: string) => process.stderr.write(message + '\n'));

  const loaded: { index: number; image: RgbImage }[] = [];
  let skipped = 0;
  job.manifest.rows.forEach((row, index) => {
    if (row.label >= numClasses || (row.trueLabel ?? 0) >= numClasses) {
      throw new Error(`row ${index}: label out of range [0, ${numClasses})`);
    }
    try {
      loaded.push({ index, image: loadImage(row.path) });
    } catch (err) {
      if (job.onError === 'fail') throw err;
      skipped += 1;
      log(`skip ${row.path}: ${(err as Error).message}`);
    }
  });

  const rows: FeatureRow[] = [];
  for (let start = 0; start < loaded.length; start += job.batchSize) {
    const batch = loaded.slice(start, start + job.batchSize);
    const embeddings = encoder.encodeBatch(batch.map((b) => b.image));
    batch.forEach((entry, i) => {
      const source = job.manifest.rows[entry.index];
      rows.push({
        id: entry.index,
        label: source.label,
        trueLabel: source.trueLabel,
        features: l2Normalize(embeddings[i]),
      });
    });
  }
  return {
    content: renderFeatureFile(rows, numClasses, encoder.dim,
                               job.manifest.hasTruth),
    skipped,
  };
}
