/**
 * Writer for the echoalign v1 feature file format:
 *
 *   echoalign-features v1 C=<int> D=<int> truth=<0|1>
 *   id,label[,true_label],f0,...,f(D-1)
 *
 * LF line endings; features printed at full round-trip precision
 * (JavaScript's default number formatting is shortest-round-trip).
 */

export interface FeatureRow {
  readonly id: number;
  readonly label: number;
  readonly trueLabel: number | null;
  readonly features: Float64Array;
}

export function l2Normalize(vector: Float64Array): Float64Array {
  let sumSquares = 0;
  for (let i = 0; i < vector.length; i++) sumSquares += vector[i] * vector[i];
  const norm = Math.sqrt(sumSquares);
  if (norm === 0) {
    throw new Error('cannot normalize a zero embedding');
  }
  const out = new Float64Array(vector.length);
  for (let i = 0; i < vector.length; i++) out[i] = vector[i] / norm;
  return out;
}

export function renderFeatureFile(
  rows: FeatureRow[], numClasses: number, dim: number, hasTruth: boolean,
): string {
  const lines = [
    `echoalign-features v1 C=${numClasses} D=${dim} truth=${hasTruth ? 1 : 0}`,
  ];
  for (const row of rows) {
    if (row.features.length !== dim) {
      throw new Error(`row ${row.id}: dim ${row.features.length} != ${dim}`);
    }
    const fields = [String(row.id), String(row.label)];
    if (hasTruth) {
      if (row.trueLabel === null) {
        throw new Error(`row ${row.id}: missing true label`);
      }
      fields.push(String(row.trueLabel));
    }
    for (let i = 0; i < dim; i++) {
      if (!Number.isFinite(row.features[i])) {
        throw new Error(`row ${row.id}: non-finite feature`);
      }
      fields.push(String(row.features[i]));
    }
    lines.push(fields.join(','));
  }
  return lines.join('\n') + '\n';
}
