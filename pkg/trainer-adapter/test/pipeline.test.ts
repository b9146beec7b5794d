/**
 * Cross-language contract test: manifests written by the Python pipeline
 * are consumed verbatim. Covers the adapter-fidelity acceptance criterion:
 * id multisets match every manifest, and corrupted manifests are rejected.
 */

import assert from 'node:assert/strict';
import { spawnSync } from 'node:child_process';
import { copyFile, readFile, rm, writeFile } from 'node:fs/promises';
import { dirname, join, resolve } from 'node:path';
import { test } from 'node:test';
import { fileURLToPath } from 'node:url';

import { ManifestIterator } from '../src/adapter.js';
import { tempDir, writeSamples } from './helpers.js';
import { SampleRecord } from '../src/samples.js';

// dist/test -> dist -> trainer-adapter -> repository root
const REPO_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), '..', '..', '..');

function fixtureRecords(n = 100): SampleRecord[] {
  const records: SampleRecord[] = [];
  for (let i = 0; i < n; i += 1) {
    const matched = i % 9;
    const facts = [];
    const present: string[] = [];
    for (let f = 0; f < 4; f += 1) {
      const head = `head${i}x${f}`;
      const tail = `tail${i}x${f}`;
      facts.push({ head, relation: `rel${f}`, tail });
      if (2 * f < matched) present.push(head);
      if (2 * f + 1 < matched) present.push(tail);
    }
    records.push({
      id: `e${String(i).padStart(3, '0')}`,
      lang: 'en',
      text: [...present, 'filler', 'words', 'here'].join(' '),
      facts,
    });
  }
  return records;
}

function runPipeline(samplesPath: string, outDir: string): void {
  const result = spawnSync(
    'python3',
    [
      '-m', 'curriculearn.cli', 'pipeline',
      '--input', samplesPath,
      '--out-dir', outDir,
      '--criterion', 'alignment',
      '--mode', 'annealing',
      '--shards', '8',
      '--seed', '4',
    ],
    {
      env: { ...process.env, PYTHONPATH: join(REPO_ROOT, 'src') },
      encoding: 'utf-8',
    },
  );
  assert.equal(result.status, 0, `pipeline failed:\n${result.stdout}\n${result.stderr}`);
}

function multiset(ids: string[]): Map<string, number> {
  const counts = new Map<string, number>();
  for (const id of ids) {
    counts.set(id, (counts.get(id) ?? 0) + 1);
  }
  return counts;
}

test('adapter yields id multisets identical to pipeline-written manifests', async () => {
  const dir = await tempDir();
  const samplesPath = join(dir, 'fixture.jsonl');
  await writeSamples(samplesPath, fixtureRecords());
  const outDir = join(dir, 'out');
  runPipeline(samplesPath, outDir);

  let previousCount = Infinity;
  for (let phase = 1; phase <= 8; phase += 1) {
    const manifestPath = join(outDir, 'manifests', `phase-${phase}.jsonl`);
    const iterator = await ManifestIterator.open(manifestPath, samplesPath);

    // independent read of the manifest body
    const lines = (await readFile(manifestPath, 'utf-8'))
      .split('\n')
      .filter(line => line.trim() !== '');
    const fileIds = lines.slice(1).map(line => (JSON.parse(line) as { id: string }).id);

    const yielded: string[] = [];
    for (const pair of iterator.pairs()) {
      yielded.push(pair.id);
      assert.ok(pair.input.includes('<H>'));
      assert.ok(pair.text.length > 0);
    }
    assert.deepEqual(yielded, fileIds); // order-faithful, no filtering
    assert.deepEqual(multiset(yielded), multiset(fileIds));
    assert.equal(yielded.length, iterator.header.count);

    // annealing: active sample pool shrinks phase over phase
    assert.ok(yielded.length <= previousCount);
    previousCount = yielded.length;
  }
  await rm(dir, { recursive: true, force: true });
});

test('corrupted manifests are rejected', async () => {
  const dir = await tempDir();
  const samplesPath = join(dir, 'fixture.jsonl');
  await writeSamples(samplesPath, fixtureRecords());
  const outDir = join(dir, 'out');
  runPipeline(samplesPath, outDir);
  const original = join(outDir, 'manifests', 'phase-8.jsonl');

  // body truncated below the header count
  const truncated = join(dir, 'truncated.jsonl');
  await copyFile(original, truncated);
  const lines = (await readFile(truncated, 'utf-8')).split('\n').filter(l => l.trim());
  await writeFile(truncated, lines.slice(0, -1).join('\n') + '\n');
  await assert.rejects(ManifestIterator.open(truncated, samplesPath), /does not match/);

  // id that resolves to nothing in the store
  const alien = join(dir, 'alien.jsonl');
  const withAlien = [...lines.slice(0, -1), JSON.stringify({ id: 'not-a-sample' })];
  await writeFile(alien, withAlien.join('\n') + '\n');
  const iterator = await ManifestIterator.open(alien, samplesPath);
  assert.throws(() => [...iterator.pairs()], /not-a-sample/);

  await rm(dir, { recursive: true, force: true });
});
