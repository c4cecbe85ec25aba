export { Encoder, resolveEncoder } from './encoders';
export { runExport, ExportJob, ExportResult } from './export';
export { renderFeatureFile, l2Normalize, FeatureRow } from './featureFile';
export { loadImage, RgbImage } from './images';
export { readManifest, Manifest, ManifestRow } from './manifest';
