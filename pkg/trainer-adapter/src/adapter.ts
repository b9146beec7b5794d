/**
 * Manifest-driven training pair iterator.
 *
 * The adapter is deliberately dumb: it performs zero reordering and zero
 * filtering. It resolves each manifest id against the sample store, in
 * manifest order, and yields (id, linearized input, reference text). All
 * curriculum decisions already happened upstream when the manifest was
 * written.
 */

import { Manifest, readManifest } from './manifest.js';
import { SampleRecord, inputText, loadSampleStore } from './samples.js';

export interface TrainingPair {
  id: string;
  input: string;
  text: string;
}

export class ManifestIterator {
  readonly manifest: Manifest;
  private readonly store: Map<string, SampleRecord>;

  private constructor(manifest: Manifest, store: Map<string, SampleRecord>) {
    this.manifest = manifest;
    this.store = store;
  }

  static async open(manifestPath: string, samplesPath: string): Promise<ManifestIterator> {
    const manifest = await readManifest(manifestPath);
    const store = await loadSampleStore(samplesPath);
    return new ManifestIterator(manifest, store);
  }

  get header() {
    return this.manifest.header;
  }

  *pairs(): Generator<TrainingPair, void, void> {
    for (const id of this.manifest.ids) {
      const sample = this.store.get(id);
      if (sample === undefined) {
        throw new Error(`manifest id ${id} not present in the sample store`);
      }
      yield { id, input: inputText(sample), text: sample.text };
    }
  }
}

/** One-shot convenience over ManifestIterator.open().pairs(). */
export async function* iterate(
  manifestPath: string,
  samplesPath: string,
): AsyncGenerator<TrainingPair, void, void> {
  const iterator = await ManifestIterator.open(manifestPath, samplesPath);
  yield* iterator.pairs();
}
