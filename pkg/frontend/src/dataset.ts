// Chunk-image dataset: graymaps plus the versioned labels.jsonl manifest
// written by the encoder.

import { existsSync, readFileSync } from "fs";
import * as path from "path";

import { MalformedDatasetError, readPgm } from "./pgm";

export class SingleClassDatasetError extends Error {}

export const LABELS_MANIFEST = "labels.jsonl";

export interface ChunkImage {
  image: string;       // file name within the dataset directory
  source: string;      // originating file name
  chunkIndex: number;
  label: 0 | 1;        // 1 = encrypted
  pixels: Uint8Array;  // 256 bytes, row-major
}

export interface Dataset {
  dir: string;
  chunkLen: number;
  entries: ChunkImage[];
}

export function loadDataset(dir: string): Dataset {
  const manifestPath = path.join(dir, LABELS_MANIFEST);
  if (!existsSync(manifestPath)) {
    throw new MalformedDatasetError(`${dir}: missing ${LABELS_MANIFEST}`);
  }
  const lines = readFileSync(manifestPath, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new MalformedDatasetError(`${manifestPath}: empty manifest`);
  }
  let header: any;
  try {
    header = JSON.parse(lines[0]);
  } catch (err) {
    throw new MalformedDatasetError(`${manifestPath}:1: ${err}`);
  }
  if (header.schema_version !== 1 || header.kind !== "chunk-image-labels") {
    throw new MalformedDatasetError(
      `${manifestPath}: not a v1 chunk-image-labels manifest`);
  }

  const entries: ChunkImage[] = [];
  for (let i = 1; i < lines.length; i++) {
    let record: any;
    try {
      record = JSON.parse(lines[i]);
    } catch (err) {
      throw new MalformedDatasetError(`${manifestPath}:${i + 1}: ${err}`);
    }
    const { image, source, chunk_index: chunkIndex, label } = record;
    if (typeof image !== "string" || typeof source !== "string" ||
        !Number.isInteger(chunkIndex) || (label !== 0 && label !== 1)) {
      throw new MalformedDatasetError(`${manifestPath}:${i + 1}: bad record fields`);
    }
    entries.push({
      image, source, chunkIndex, label,
      pixels: readPgm(path.join(dir, image)),
    });
  }
  return { dir, chunkLen: header.chunk_len ?? 10240, entries };
}

/** Throw unless both classes are present (training needs positives and negatives). */
export function requireBothClasses(dataset: Dataset): void {
  const labels = new Set(dataset.entries.map((e) => e.label));
  if (labels.size < 2) {
    throw new SingleClassDatasetError(
      `dataset ${dataset.dir} contains only label ${[...labels].join(",") || "none"}`);
  }
}

/** Group entries by source file, each group sorted by chunk index. */
export function groupBySource(dataset: Dataset): Map<string, ChunkImage[]> {
  const groups = new Map<string, ChunkImage[]>();
  for (const entry of dataset.entries) {
    const group = groups.get(entry.source) ?? [];
    group.push(entry);
    groups.set(entry.source, group);
  }
  for (const group of groups.values()) {
    group.sort((a, b) => a.chunkIndex - b.chunkIndex);
  }
  return groups;
}
