/**
 * Phase-manifest reading.
 *
 * A manifest file is one JSON header line
 * {"phase","seed","mode","criterion","K","active_shards","count"}
 * followed by exactly `count` lines of {"id"} in sampling order.
 */

import { readFile } from 'node:fs/promises';

export interface ManifestHeader {
  phase: number;
  seed: number;
  mode: string;
  criterion: string;
  K: number;
  active_shards: number[];
  count: number;
}

export interface Manifest {
  header: ManifestHeader;
  ids: string[];
}

const HEADER_FIELDS = ['phase', 'seed', 'mode', 'criterion', 'K', 'active_shards', 'count'] as const;

export async function readManifest(path: string): Promise<Manifest> {
  const content = await readFile(path, 'utf-8');
  const lines = content.split('\n').filter(line => line.trim() !== '');
  if (lines.length === 0) {
    throw new Error(`${path}: empty manifest`);
  }
  let header: ManifestHeader;
  try {
    header = JSON.parse(lines[0]) as ManifestHeader;
  } catch {
    throw new Error(`${path}: malformed manifest header`);
  }
  for (const field of HEADER_FIELDS) {
    if (header[field] === undefined) {
      throw new Error(`${path}: manifest header is missing "${field}"`);
    }
  }
  const ids: string[] = [];
  for (let i = 1; i < lines.length; i += 1) {
    let record: { id?: unknown };
    try {
      record = JSON.parse(lines[i]) as { id?: unknown };
    } catch {
      throw new Error(`${path}: line ${i + 1}: malformed id record`);
    }
    if (typeof record.id !== 'string') {
      throw new Error(`${path}: line ${i + 1}: id record has no string "id"`);
    }
    ids.push(record.id);
  }
  if (ids.length !== header.count) {
    throw new Error(
      `${path}: header count ${header.count} does not match ${ids.length} body ids`,
    );
  }
  return { header, ids };
}
