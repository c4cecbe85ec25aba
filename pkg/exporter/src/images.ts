import * as fs from 'fs';
import * as path from 'path';
import { PNG } from 'pngjs';

/** Decoded image: row-major RGB triples, 8-bit. */
export interface RgbImage {
  readonly width: number;
  readonly height: number;
  readonly rgb: Uint8Array;
}

function decodePng(buffer: Buffer): RgbImage {
  const png = PNG.sync.read(buffer);
  const rgb = new Uint8Array(png.width * png.height * 3);
  for (let i = 0; i < png.width * png.height; i++) {
    rgb[i * 3] = png.data[i * 4];
    rgb[i * 3 + 1] = png.data[i * 4 + 1];
    rgb[i * 3 + 2] = png.data[i * 4 + 2];
  }
  return { width: png.width, height: png.height, rgb };
}

/** Binary PPM (P6, maxval 255), tolerant of comments and any whitespace. */
function decodePpm(buffer: Buffer): RgbImage {
  const tokens: string[] = [];
  let pos = 0;
  while (tokens.length < 4 && pos < buffer.length) {
    const ch = String.fromCharCode(buffer[pos]);
    if (ch === '#') {
      while (pos < buffer.length && buffer[pos] !== 0x0a) pos++;
      pos++;
    } else if (/\s/.test(ch)) {
      pos++;
    } else {
      let tok = '';
      while (pos < buffer.length && !/\s/.test(String.fromCharCode(buffer[pos]))) {
        tok += String.fromCharCode(buffer[pos]);
        pos++;
      }
      tokens.push(tok);
    }
  }
  if (tokens[0] !== 'P6') {
    throw new Error(`not a binary PPM (magic ${tokens[0]})`);
  }
  const [width, height, maxval] = tokens.slice(1).map(Number);
  if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
    throw new Error('bad PPM dimensions');
  }
  if (maxval !== 255) {
    throw new Error(`unsupported PPM maxval ${maxval}`);
  }
  pos++; // single whitespace after maxval
  const need = width * height * 3;
  if (buffer.length - pos < need) {
    throw new Error('truncated PPM pixel data');
  }
  return { width, height, rgb: new Uint8Array(buffer.subarray(pos, pos + need)) };
}

export function loadImage(filePath: string): RgbImage {
  const buffer = fs.readFileSync(filePath);
  const ext = path.extname(filePath).toLowerCase();
  if (ext === '.png') return decodePng(buffer);
  if (ext === '.ppm') return decodePpm(buffer);
  throw new Error(`unsupported image format ${ext || '(none)'}`);
}
