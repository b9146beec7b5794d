/**
 * Demo loop: walk phase-1..K manifests in order and invoke a stub hook per
 * pair, the way a host training loop would. No learning happens here; the
 * point is proving the file contract end to end.
 */

import { access } from 'node:fs/promises';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { ManifestIterator, TrainingPair } from './adapter.js';
import { readManifest } from './manifest.js';

export type PairHook = (phase: number, epoch: number, pair: TrainingPair) => void;

export interface DemoResult {
  log: string[];
  hookCalls: number;
}

export async function demoLoop(
  manifestsDir: string,
  samplesPath: string,
  epochsPerPhase: number,
  hook: PairHook = () => {},
): Promise<DemoResult> {
  if (epochsPerPhase < 0) {
    throw new Error('epochsPerPhase must be >= 0');
  }
  const firstPath = join(manifestsDir, 'phase-1.jsonl');
  await access(firstPath).catch(() => {
    throw new Error(`missing manifest file ${firstPath}`);
  });
  const k = (await readManifest(firstPath)).header.K;

  const log: string[] = [];
  let hookCalls = 0;
  for (let phase = 1; phase <= k; phase += 1) {
    const path = join(manifestsDir, `phase-${phase}.jsonl`);
    await access(path).catch(() => {
      throw new Error(`missing manifest file ${path}`);
    });
    const iterator = await ManifestIterator.open(path, samplesPath);
    for (let epoch = 1; epoch <= epochsPerPhase; epoch += 1) {
      for (const pair of iterator.pairs()) {
        hook(phase, epoch, pair);
        hookCalls += 1;
      }
    }
    log.push(
      `phase ${phase}/${k}: ${iterator.header.count} pairs x ${epochsPerPhase} epochs ` +
        `(mode=${iterator.header.mode}, criterion=${iterator.header.criterion})`,
    );
  }
  return { log, hookCalls };
}

async function main(argv: string[]): Promise<number> {
  const [manifestsDir, samplesPath, epochsArg] = argv;
  if (!manifestsDir || !samplesPath) {
    console.error('usage: demo.js <manifests-dir> <samples.jsonl> [epochs-per-phase]');
    return 2;
  }
  const epochs = epochsArg === undefined ? 1 : Number(epochsArg);
  if (!Number.isInteger(epochs) || epochs < 0) {
    console.error(`bad epochs-per-phase: ${epochsArg}`);
    return 2;
  }
  try {
    const result = await demoLoop(manifestsDir, samplesPath, epochs);
    for (const line of result.log) {
      console.log(line);
    }
    console.log(`total hook invocations: ${result.hookCalls}`);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
}

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  main(process.argv.slice(2)).then(code => {
    process.exitCode = code;
  });
}
