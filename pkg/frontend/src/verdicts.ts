// Verdict interchange writer: one record per chunk, tab-separated
// "index\tlabel\tscore", sorted by index, written atomically.

import { mkdirSync, renameSync, writeFileSync } from "fs";
import * as path from "path";

export interface ChunkVerdict {
  index: number;
  label: 0 | 1;
  score: number; // positive-class probability
}

export const VERDICT_SUFFIX = ".verdicts.tsv";

export function formatVerdicts(verdicts: ChunkVerdict[]): string {
  const sorted = [...verdicts].sort((a, b) => a.index - b.index);
  return sorted
    .map((v) => `${v.index}\t${v.label}\t${Number(v.score.toPrecision(6))}`)
    .join("\n") + "\n";
}

export function writeVerdictFile(verdicts: ChunkVerdict[], dir: string,
                                 sourceName: string): string {
  mkdirSync(dir, { recursive: true });
  const target = path.join(dir, sourceName + VERDICT_SUFFIX);
  const tmp = path.join(dir, `.${sourceName}${VERDICT_SUFFIX}.tmp`);
  writeFileSync(tmp, formatVerdicts(verdicts), "utf-8");
  renameSync(tmp, target);
  return target;
}
