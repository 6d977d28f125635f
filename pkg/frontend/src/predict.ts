// Inference: one verdict file per source file, labels by argmax over the two
// logits, scores as positive-class probability.

import * as tf from "@tensorflow/tfjs";

import { Dataset, groupBySource } from "./dataset";
import { loadModel } from "./model";
import { toInputTensor } from "./preprocess";
import { ChunkVerdict, writeVerdictFile } from "./verdicts";

export interface PredictResult {
  files: Map<string, ChunkVerdict[]>;
  written: string[];
}

export function predictVerdicts(model: tf.LayersModel, dataset: Dataset):
    Map<string, ChunkVerdict[]> {
  const groups = groupBySource(dataset);
  const files = new Map<string, ChunkVerdict[]>();
  for (const [source, entries] of groups) {
    const { labels, positive } = tf.tidy(() => {
      const x = toInputTensor(entries.map((e) => e.pixels));
      const logits = model.apply(x, { training: false }) as tf.Tensor2D;
      const probs = tf.softmax(logits);
      return {
        labels: Array.from(logits.argMax(1).dataSync()),
        positive: Array.from(probs.slice([0, 1], [entries.length, 1]).dataSync()),
      };
    });
    files.set(source, entries.map((entry, i): ChunkVerdict => ({
      index: entry.chunkIndex,
      label: labels[i] as 0 | 1,
      score: positive[i],
    })));
  }
  return files;
}

export async function predictToDir(modelDir: string, dataset: Dataset,
                                   outDir: string): Promise<PredictResult> {
  const { model } = await loadModel(modelDir);
  if (dataset.entries.length === 0) {
    console.warn(`warning: dataset ${dataset.dir} has no chunk images; ` +
                 "no verdict files written");
    return { files: new Map(), written: [] };
  }
  const files = predictVerdicts(model, dataset);
  const written: string[] = [];
  for (const [source, verdicts] of files) {
    written.push(writeVerdictFile(verdicts, outDir, source));
  }
  return { files, written };
}
