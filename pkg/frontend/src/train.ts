// Training loop: cross-entropy on two logits, adaptive optimizer with
// decoupled weight decay applied to the conv/dense kernels after each step,
// no geometric or photometric augmentation (it would change what the
// histogram pixels mean).

import * as tf from "@tensorflow/tfjs";

import { Dataset, requireBothClasses } from "./dataset";
import { ARTIFACT_KIND, ARTIFACT_VERSION, ModelMetadata, buildModel, saveModel } from "./model";
import { CHANNEL_MEAN, CHANNEL_STD, toInputTensor } from "./preprocess";

export interface TrainSpec {
  epochs: number;
  learningRate: number;
  batchSize: number;
  weightDecay: number;
  seed: number;
}

export const DEFAULT_SPEC: TrainSpec = {
  epochs: 25,
  learningRate: 1e-4,
  batchSize: 32,
  weightDecay: 1e-4,
  seed: 0,
};

/** Small deterministic PRNG for data shuffling (mulberry32). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function shuffled(n: number, rand: () => number): number[] {
  const order = Array.from({ length: n }, (_, i) => i);
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [order[i], order[j]] = [order[j], order[i]];
  }
  return order;
}

export interface TrainResult {
  model: tf.LayersModel;
  metadata: ModelMetadata;
  history: { epoch: number; loss: number }[];
  finalAccuracy: number;
  finalLoss: number;
}

export async function train(dataset: Dataset, spec: TrainSpec = DEFAULT_SPEC,
                            quiet = false): Promise<TrainResult> {
  requireBothClasses(dataset);
  if (spec.epochs < 1 || spec.learningRate <= 0 || spec.batchSize < 1) {
    throw new Error("epochs >= 1, learningRate > 0, batchSize >= 1 required");
  }

  const xAll = toInputTensor(dataset.entries.map((e) => e.pixels));
  const yAll = tf.oneHot(
    tf.tensor1d(dataset.entries.map((e) => e.label), "int32"), 2);

  const model = buildModel(spec.seed);
  const optimizer = tf.train.adam(spec.learningRate);
  // the underlying tf.Variable of each layer weight; gradients flow through
  // these when the model is applied inside minimize()
  const variables = model.trainableWeights.map((w) => (w as any).val as tf.Variable);
  const kernels = variables.filter((v) => v.name.includes("kernel"));
  const decay = 1 - spec.learningRate * spec.weightDecay;

  const n = dataset.entries.length;
  const rand = mulberry32(spec.seed ^ 0x9e3779b9);
  const history: TrainResult["history"] = [];

  for (let epoch = 0; epoch < spec.epochs; epoch++) {
    const order = shuffled(n, rand);
    let lossSum = 0;
    let batches = 0;
    for (let start = 0; start < n; start += spec.batchSize) {
      const idx = tf.tensor1d(order.slice(start, start + spec.batchSize), "int32");
      const bx = tf.gather(xAll, idx);
      const by = tf.gather(yAll, idx);
      const cost = optimizer.minimize(() => tf.losses.softmaxCrossEntropy(
        by, model.apply(bx, { training: true }) as tf.Tensor2D), true, variables);
      tf.tidy(() => {
        for (const kernel of kernels) {
          kernel.assign(kernel.mul(decay));
        }
      });
      lossSum += cost!.dataSync()[0];
      batches += 1;
      tf.dispose([idx, bx, by, cost!]);
    }
    history.push({ epoch: epoch + 1, loss: lossSum / batches });
    if (!quiet) {
      console.log(`epoch ${epoch + 1}/${spec.epochs}: ` +
                  `loss=${(lossSum / batches).toFixed(4)}`);
    }
  }

  // full-set evaluation once; per-epoch passes would double the runtime on
  // the pure-JS backend
  const { loss: finalLoss, accuracy: finalAccuracy } = evaluate(model, xAll, yAll);
  if (!quiet) {
    console.log(`final train accuracy ${(finalAccuracy * 100).toFixed(2)}%`);
  }
  const metadata: ModelMetadata = {
    kind: ARTIFACT_KIND,
    version: ARTIFACT_VERSION,
    backbone: "3-block stride-2 convnet (8/16/32 filters, GAP, two-logit head)",
    epochs: spec.epochs,
    learningRate: spec.learningRate,
    batchSize: spec.batchSize,
    weightDecay: spec.weightDecay,
    seed: spec.seed,
    preprocessing: {
      upsample: "nearest-neighbor 16x16 -> 32x32",
      channels: 3,
      channelMean: CHANNEL_MEAN,
      channelStd: CHANNEL_STD,
    },
    finalTrainAccuracy: finalAccuracy,
    finalTrainLoss: finalLoss,
  };
  tf.dispose([xAll, yAll]);
  optimizer.dispose();
  return { model, metadata, history, finalAccuracy, finalLoss };
}

export function evaluate(model: tf.LayersModel, x: tf.Tensor4D,
                         yOneHot: tf.Tensor): { loss: number; accuracy: number } {
  return tf.tidy(() => {
    const logits = model.apply(x, { training: false }) as tf.Tensor2D;
    const loss = tf.losses.softmaxCrossEntropy(yOneHot, logits).dataSync()[0];
    const predicted = logits.argMax(1);
    const truth = (yOneHot as tf.Tensor2D).argMax(1);
    const accuracy = predicted.equal(truth).mean().dataSync()[0];
    return { loss, accuracy };
  });
}

export async function trainToDir(dataset: Dataset, spec: TrainSpec,
                                 outDir: string, quiet = false): Promise<TrainResult> {
  const result = await train(dataset, spec, quiet);
  await saveModel(result.model, result.metadata, outDir);
  return result;
}
