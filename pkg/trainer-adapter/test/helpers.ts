import { mkdtemp, writeFile } from 'node:fs/promises';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { SampleRecord } from '../src/samples.js';

export async function tempDir(): Promise<string> {
  return mkdtemp(join(tmpdir(), 'trainer-adapter-'));
}

export function factSample(id: string, text: string, head = 'alpha', tail = 'beta'): SampleRecord {
  return {
    id,
    lang: 'en',
    text,
    facts: [{ head, relation: 'rel', tail }],
  };
}

export async function writeSamples(path: string, records: SampleRecord[]): Promise<void> {
  await writeFile(path, records.map(r => JSON.stringify(r)).join('\n') + '\n');
}

export interface ManifestSpec {
  phase: number;
  ids: string[];
  k?: number;
  mode?: string;
  criterion?: string;
  seed?: number;
  countOverride?: number;
}

export async function writeManifest(dir: string, spec: ManifestSpec): Promise<string> {
  const header = {
    phase: spec.phase,
    seed: spec.seed ?? 0,
    mode: spec.mode ?? 'annealing',
    criterion: spec.criterion ?? 'alignment',
    K: spec.k ?? 1,
    active_shards: [spec.phase],
    count: spec.countOverride ?? spec.ids.length,
  };
  const lines = [JSON.stringify(header), ...spec.ids.map(id => JSON.stringify({ id }))];
  const path = join(dir, `phase-${spec.phase}.jsonl`);
  await writeFile(path, lines.join('\n') + '\n');
  return path;
}
