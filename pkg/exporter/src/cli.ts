#!/usr/bin/env node
/**
 * Export an image manifest to an echoalign v1 feature file.
 *
 *   node dist/cli.js --manifest images.csv --encoder patch-mean \
 *       --out features.txt [--classes 10] [--batch-size 16] \
 *       [--on-error fail|skip]
 *
 * Exit codes: 0 success, 1 usage error, 2 data error.
 */

import * as fs from 'fs';
import { runExport } from './export';
import { readManifest } from './manifest';

interface Args {
  manifest: string;
  encoder: string;
  out: string;
  classes: number | null;
  batchSize: number;
  onError: 'fail' | 'skip';
}

function usage(message: string): never {
  process.stderr.write(
    `error: ${message}\nusage: cli.js --manifest <csv> --encoder <name> ` +
    '--out <path> [--classes N] [--batch-size N] [--on-error fail|skip]\n',
  );
  process.exit(1);
}

function parseArgs(argv: string[]): Args {
  const args: Args = {
    manifest: '', encoder: 'patch-mean', out: '',
    classes: null, batchSize: 16, onError: 'fail',
  };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) usage(`missing value for ${flag}`);
    switch (flag) {
      case '--manifest': args.manifest = value; break;
      case '--encoder': args.encoder = value; break;
      case '--out': args.out = value; break;
      case '--classes': {
        const n = Number(value);
        if (!Number.isInteger(n) || n < 2) usage('--classes must be an integer >= 2');
        args.classes = n;
        break;
      }
      case '--batch-size': {
        const n = Number(value);
        if (!Number.isInteger(n) || n < 1) usage('--batch-size must be a positive integer');
        args.batchSize = n;
        break;
      }
      case '--on-error':
        if (value !== 'fail' && value !== 'skip') usage("--on-error must be 'fail' or 'skip'");
        args.onError = value;
        break;
      default:
        usage(`unknown flag ${flag}`);
    }
  }
  if (!args.manifest) usage('--manifest is required');
  if (!args.out) usage('--out is required');
  return args;
}

function main(): number {
  const args = parseArgs(process.argv.slice(2));
  try {
    const result = runExport({
      manifest: readManifest(args.manifest),
      encoderName: args.encoder,
      batchSize: args.batchSize,
      numClasses: args.classes,
      onError: args.onError,
    });
    fs.writeFileSync(args.out, result.content);
    if (result.skipped > 0) {
      process.stderr.write(`skipped ${result.skipped} unreadable image(s)\n`);
    }
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
}

process.exit(main());
