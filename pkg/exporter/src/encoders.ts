import { RgbImage } from './images';

/**
 * An encoder turns a batch of images into fixed-length embeddings.
 * Implementations must be deterministic for fixed weights/parameters;
 * batching is a throughput detail and must not change any row.
 */
export interface Encoder {
  readonly name: string;
  readonly dim: number;
  encodeBatch(images: RgbImage[]): Float64Array[];
}

function boxMean(
  image: RgbImage, channel: number, grid: number, gx: number, gy: number,
): number {
  const x0 = Math.floor((gx * image.width) / grid);
  const x1 = Math.max(x0 + 1, Math.floor(((gx + 1) * image.width) / grid));
  const y0 = Math.floor((gy * image.height) / grid);
  const y1 = Math.max(y0 + 1, Math.floor(((gy + 1) * image.height) / grid));
  let total = 0;
  for (let y = y0; y < y1; y++) {
    for (let x = x0; x < x1; x++) {
      total += image.rgb[(y * image.width + x) * 3 + channel];
    }
  }
  return total / ((x1 - x0) * (y1 - y0) * 255);
}

/** 4x4 box-averaged RGB patches: 48 dimensions, resolution independent. */
class PatchMeanEncoder implements Encoder {
  readonly name = 'patch-mean';
  readonly dim = 48;

  encodeBatch(images: RgbImage[]): Float64Array[] {
    return images.map((image) => {
      const out = new Float64Array(this.dim);
      let k = 0;
      for (let channel = 0; channel < 3; channel++) {
        for (let gy = 0; gy < 4; gy++) {
          for (let gx = 0; gx < 4; gx++) {
            out[k++] = boxMean(image, channel, 4, gx, gy);
          }
        }
      }
      return out;
    });
  }
}

/** 32-bin luminance histogram: a crude global appearance signature. */
class LumaHistEncoder implements Encoder {
  readonly name = 'luma-hist';
  readonly dim = 32;

  encodeBatch(images: RgbImage[]): Float64Array[] {
    return images.map((image) => {
      const out = new Float64Array(this.dim);
      const pixels = image.width * image.height;
      for (let i = 0; i < pixels; i++) {
        const luma = 0.299 * image.rgb[i * 3]
          + 0.587 * image.rgb[i * 3 + 1]
          + 0.114 * image.rgb[i * 3 + 2];
        out[Math.min(31, Math.floor(luma / 8))] += 1 / pixels;
      }
      return out;
    });
  }
}

const BUILTINS: Record<string, () => Encoder> = {
  'patch-mean': () => new PatchMeanEncoder(),
  'luma-hist': () => new LumaHistEncoder(),
};

/**
 * Resolve an encoder by name. Pretrained networks plug in here: implement
 * Encoder around the model's forward pass and add it to the registry; the
 * exporter treats every encoder as a black box.
 */
export function resolveEncoder(name: string): Encoder {
  const make = BUILTINS[name];
  if (!make) {
    throw new Error(
      `unknown encoder '${name}' (available: ${Object.keys(BUILTINS).join(', ')})`,
    );
  }
  return make();
}
