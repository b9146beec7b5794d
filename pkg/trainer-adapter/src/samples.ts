/**
 * Sample-store loading and input linearization.
 *
 * Mirrors the pipeline's JSONL record schema and tag conventions exactly:
 * fact records linearize as `<H> h <R> r <T> t` per triple, table records
 * as `<page> P <section> S` followed by `<cell> value <col> header` per
 * cell; empty fields contribute no token, so their tag abuts the next one.
 */

import { readFile } from 'node:fs/promises';

export interface FactRecord {
  head: string;
  relation: string;
  tail: string;
}

export interface CellRecord {
  column_header: string;
  value: string;
}

export interface SampleRecord {
  id: string;
  lang: string;
  text: string;
  facts?: FactRecord[];
  page_title?: string;
  section_title?: string;
  cells?: CellRecord[];
  meta?: Record<string, unknown>;
}

export function linearizeFacts(facts: FactRecord[]): string {
  if (facts.length === 0) {
    throw new Error('no facts');
  }
  const parts: string[] = [];
  for (const fact of facts) {
    parts.push('<H>', fact.head, '<R>', fact.relation, '<T>', fact.tail);
  }
  return parts.filter(part => part !== '').join(' ');
}

export function linearizeTable(
  pageTitle: string,
  sectionTitle: string,
  cells: CellRecord[],
): string {
  if (cells.length === 0) {
    throw new Error('no cells');
  }
  const parts: string[] = ['<page>', pageTitle, '<section>', sectionTitle];
  for (const cell of cells) {
    parts.push('<cell>', cell.value, '<col>', cell.column_header);
  }
  return parts.filter(part => part !== '').join(' ');
}

export function inputText(sample: SampleRecord): string {
  if (sample.facts !== undefined) {
    return linearizeFacts(sample.facts);
  }
  if (sample.cells !== undefined) {
    return linearizeTable(sample.page_title ?? '', sample.section_title ?? '', sample.cells);
  }
  throw new Error(`sample ${sample.id} has neither facts nor cells`);
}

/** Load a JSONL sample file into an id-keyed store. */
export async function loadSampleStore(path: string): Promise<Map<string, SampleRecord>> {
  const content = await readFile(path, 'utf-8');
  const store = new Map<string, SampleRecord>();
  let lineNo = 0;
  for (const line of content.split('\n')) {
    lineNo += 1;
    const trimmed = line.trim();
    if (!trimmed) continue;
    let record: SampleRecord;
    try {
      record = JSON.parse(trimmed) as SampleRecord;
    } catch {
      throw new Error(`${path}: line ${lineNo}: malformed JSON`);
    }
    const id = record.id ?? `line-${lineNo}`;
    if (store.has(id)) {
      throw new Error(`${path}: line ${lineNo}: duplicate sample id ${id}`);
    }
    store.set(id, { ...record, id });
  }
  return store;
}
