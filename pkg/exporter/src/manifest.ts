import * as fs from 'fs';

export interface ManifestRow {
  readonly path: string;
  readonly label: number;
  readonly trueLabel: number | null;
}

export interface Manifest {
  readonly rows: ManifestRow[];
  readonly hasTruth: boolean;
}

function parseLabel(field: string, lineno: number): number {
  const value = Number(field);
  if (!Number.isInteger(value) || value < 0) {
    throw new Error(`manifest line ${lineno}: bad label '${field}'`);
  }
  return value;
}

/**
 * CSV manifest: header `path,label` or `path,label,true_label`, one image
 * per following row. Paths may not contain commas.
 */
export function readManifest(filePath: string): Manifest {
  const lines = fs.readFileSync(filePath, 'utf-8').split('\n');
  while (lines.length && lines[lines.length - 1] === '') lines.pop();
  if (lines.length === 0) {
    throw new Error('manifest is empty (expected a header line)');
  }
  const header = lines[0].trim();
  let hasTruth: boolean;
  if (header === 'path,label') {
    hasTruth = false;
  } else if (header === 'path,label,true_label') {
    hasTruth = true;
  } else {
    throw new Error(
      `manifest line 1: expected 'path,label[,true_label]', got '${header}'`,
    );
  }
  const expected = hasTruth ? 3 : 2;
  const rows: ManifestRow[] = [];
  lines.slice(1).forEach((line, i) => {
    const lineno = i + 2;
    const fields = line.split(',');
    if (fields.length !== expected) {
      throw new Error(
        `manifest line ${lineno}: expected ${expected} fields, got ${fields.length}`,
      );
    }
    rows.push({
      path: fields[0],
      label: parseLabel(fields[1], lineno),
      trueLabel: hasTruth ? parseLabel(fields[2], lineno) : null,
    });
  });
  return { rows, hasTruth };
}
