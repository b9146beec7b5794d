import assert from 'node:assert/strict';
import { rm, writeFile } from 'node:fs/promises';
import { join } from 'node:path';
import { test } from 'node:test';

import { ManifestIterator, iterate } from '../src/adapter.js';
import { readManifest } from '../src/manifest.js';
import { demoLoop } from '../src/demo.js';
import { inputText, linearizeFacts, linearizeTable } from '../src/samples.js';
import { factSample, tempDir, writeManifest, writeSamples } from './helpers.js';

test('linearizers mirror the pipeline tag conventions', () => {
  assert.equal(
    linearizeFacts([{ head: 'X', relation: 'occupation', tail: 'singer' }]),
    '<H> X <R> occupation <T> singer',
  );
  assert.equal(
    linearizeTable('P', 'S', [{ column_header: 'Year', value: '1999' }]),
    '<page> P <section> S <cell> 1999 <col> Year',
  );
  // empty header: its tag abuts the next marker with a single space
  assert.equal(
    linearizeTable('P', 'S', [
      { column_header: '', value: '42' },
      { column_header: 'Name', value: 'Ada' },
    ]),
    '<page> P <section> S <cell> 42 <col> <cell> Ada <col> Name',
  );
  assert.throws(() => linearizeFacts([]), /no facts/);
});

test('iterate yields every manifest id in order with resolved texts', async () => {
  const dir = await tempDir();
  const samplesPath = join(dir, 'samples.jsonl');
  const records = ['a', 'b', 'c', 'd', 'e'].map(id => factSample(id, `text of ${id}`));
  await writeSamples(samplesPath, records);
  const manifestPath = await writeManifest(dir, { phase: 1, ids: ['c', 'a', 'e', 'b', 'd'] });

  const seen: string[] = [];
  for await (const pair of iterate(manifestPath, samplesPath)) {
    seen.push(pair.id);
    assert.equal(pair.text, `text of ${pair.id}`);
    assert.equal(pair.input, '<H> alpha <R> rel <T> beta');
  }
  assert.deepEqual(seen, ['c', 'a', 'e', 'b', 'd']);
  await rm(dir, { recursive: true, force: true });
});

test('header metadata is exposed to the caller', async () => {
  const dir = await tempDir();
  const samplesPath = join(dir, 'samples.jsonl');
  await writeSamples(samplesPath, [factSample('a', 'text a')]);
  const manifestPath = await writeManifest(dir, {
    phase: 2,
    ids: ['a'],
    k: 4,
    mode: 'expanding',
    criterion: 'rarity',
    seed: 11,
  });
  const iterator = await ManifestIterator.open(manifestPath, samplesPath);
  assert.equal(iterator.header.K, 4);
  assert.equal(iterator.header.mode, 'expanding');
  assert.equal(iterator.header.criterion, 'rarity');
  assert.equal(iterator.header.seed, 11);
  await rm(dir, { recursive: true, force: true });
});

test('unknown manifest id is an error naming the id', async () => {
  const dir = await tempDir();
  const samplesPath = join(dir, 'samples.jsonl');
  await writeSamples(samplesPath, [factSample('a', 'text a')]);
  const manifestPath = await writeManifest(dir, { phase: 1, ids: ['a', 'ghost'] });
  const iterator = await ManifestIterator.open(manifestPath, samplesPath);
  assert.throws(() => [...iterator.pairs()], /ghost/);
  await rm(dir, { recursive: true, force: true });
});

test('header/body count mismatch is rejected', async () => {
  const dir = await tempDir();
  const manifestPath = await writeManifest(dir, {
    phase: 1,
    ids: ['a', 'b'],
    countOverride: 3,
  });
  await assert.rejects(readManifest(manifestPath), /count 3 does not match 2/);
  await rm(dir, { recursive: true, force: true });
});

test('empty manifest body with count 0 header yields an empty stream', async () => {
  const dir = await tempDir();
  const samplesPath = join(dir, 'samples.jsonl');
  await writeSamples(samplesPath, [factSample('a', 'text a')]);
  const manifestPath = await writeManifest(dir, { phase: 1, ids: [] });
  const pairs = [];
  for await (const pair of iterate(manifestPath, samplesPath)) {
    pairs.push(pair);
  }
  assert.deepEqual(pairs, []);
  await rm(dir, { recursive: true, force: true });
});

test('missing header fields are rejected', async () => {
  const dir = await tempDir();
  const path = join(dir, 'phase-1.jsonl');
  await writeFile(path, JSON.stringify({ phase: 1, count: 0 }) + '\n');
  await assert.rejects(readManifest(path), /missing "seed"/);
  await rm(dir, { recursive: true, force: true });
});

test('demo loop walks phases in order and counts hook calls', async () => {
  const dir = await tempDir();
  const samplesPath = join(dir, 'samples.jsonl');
  const ids = ['a', 'b', 'c', 'd', 'e', 'f'];
  await writeSamples(samplesPath, ids.map(id => factSample(id, `text ${id}`)));
  // annealing-shaped sizes: 6, 4, 2, 1
  const phases = [ids, ids.slice(2), ids.slice(4), ids.slice(5)];
  for (const [index, phaseIds] of phases.entries()) {
    await writeManifest(dir, { phase: index + 1, ids: phaseIds, k: 4 });
  }

  const epochs = 2;
  const calls: Array<[number, number, string]> = [];
  const result = await demoLoop(dir, samplesPath, epochs, (phase, epoch, pair) =>
    calls.push([phase, epoch, pair.id]),
  );
  const expectedCalls = phases.reduce((sum, p) => sum + p.length, 0) * epochs;
  assert.equal(result.hookCalls, expectedCalls);
  assert.equal(result.log.length, 4);
  assert.match(result.log[0], /phase 1\/4: 6 pairs x 2 epochs/);
  assert.deepEqual(
    calls.filter(([phase]) => phase === 4).map(([, , id]) => id),
    ['f', 'f'],
  );

  const rerun = await demoLoop(dir, samplesPath, epochs);
  assert.deepEqual(rerun.log, result.log);
  assert.equal(rerun.hookCalls, result.hookCalls);

  await rm(join(dir, 'phase-3.jsonl'));
  await assert.rejects(demoLoop(dir, samplesPath, 1), /missing manifest file .*phase-3/);
  await rm(dir, { recursive: true, force: true });
});
