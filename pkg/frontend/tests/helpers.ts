// Shared fixture builders: a linearly separable toy dataset in the encoder's
// on-disk format (one-hot histogram images vs near-white ciphertext-like
// images).

import { mkdirSync, writeFileSync } from "fs";
import * as path from "path";

import { mulberry32 } from "../src/train";

export function writePgm(dir: string, name: string, pixels: Uint8Array): string {
  const file = path.join(dir, name);
  writeFileSync(file, Buffer.concat([Buffer.from("P5\n16 16\n255\n"), Buffer.from(pixels)]));
  return file;
}

export function oneHotImage(rand: () => number): Uint8Array {
  const pixels = new Uint8Array(256);
  pixels[Math.floor(rand() * 256)] = 255;
  return pixels;
}

export function nearWhiteImage(rand: () => number): Uint8Array {
  const pixels = new Uint8Array(256);
  for (let i = 0; i < 256; i++) {
    pixels[i] = 200 + Math.floor(rand() * 56);
  }
  pixels[Math.floor(rand() * 256)] = 255; // max-normalized images peak at 255
  return pixels;
}

export interface ToyDatasetOptions {
  dir: string;
  nSources: number;
  chunksPerSource: number;
  seed: number;
}

/** Write a separable toy dataset; chunk labels alternate within each source
 * so every verdict file sees both classes. Returns the manifest records. */
export function writeToyDataset(opts: ToyDatasetOptions):
    { image: string; source: string; chunk_index: number; label: 0 | 1 }[] {
  mkdirSync(opts.dir, { recursive: true });
  const rand = mulberry32(opts.seed);
  const records: { image: string; source: string; chunk_index: number; label: 0 | 1 }[] = [];
  for (let s = 0; s < opts.nSources; s++) {
    const source = `toy_${String(s).padStart(3, "0")}.bin`;
    for (let c = 0; c < opts.chunksPerSource; c++) {
      const label = ((s + c) % 2) as 0 | 1;
      const pixels = label === 1 ? nearWhiteImage(rand) : oneHotImage(rand);
      const image = `toy_${String(s).padStart(3, "0")}__c${String(c).padStart(4, "0")}__l${label}.pgm`;
      writePgm(opts.dir, image, pixels);
      records.push({ image, source, chunk_index: c, label });
    }
  }
  const lines = [JSON.stringify({ schema_version: 1, kind: "chunk-image-labels", chunk_len: 10240 })];
  for (const record of records) {
    lines.push(JSON.stringify(record));
  }
  writeFileSync(path.join(opts.dir, "labels.jsonl"), lines.join("\n") + "\n");
  return records;
}
