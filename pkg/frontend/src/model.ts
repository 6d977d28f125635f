// Compact convolutional chunk classifier and its on-disk artifact format.
//
// Three conv blocks over the 32x32x3 input feed a global average pool and a
// two-logit head. Weight initializers are seeded so a (dataset, seed) pair
// reproduces the same trained model on the deterministic CPU backend.

import * as tf from "@tensorflow/tfjs";
import { mkdirSync, readFileSync, renameSync, writeFileSync } from "fs";
import * as path from "path";

import { CHANNELS, INPUT_SIDE } from "./preprocess";

export class IncompatibleModelError extends Error {}

export const ARTIFACT_KIND = "cipherscope-cnn";
export const ARTIFACT_VERSION = 1;

export interface ModelMetadata {
  kind: string;
  version: number;
  backbone: string;
  epochs: number;
  learningRate: number;
  batchSize: number;
  weightDecay: number;
  seed: number;
  preprocessing: {
    upsample: string;
    channels: number;
    channelMean: number;
    channelStd: number;
  };
  finalTrainAccuracy: number;
  finalTrainLoss: number;
}

export function buildModel(seed: number): tf.LayersModel {
  // stride-2 convs halve the feature map at every block; the pure-JS CPU
  // backend makes anything heavier impractically slow to train
  const model = tf.sequential();
  const conv = (filters: number, layerSeed: number, first = false) =>
    tf.layers.conv2d({
      filters,
      kernelSize: 3,
      strides: 2,
      padding: "same",
      activation: "relu",
      kernelInitializer: tf.initializers.heNormal({ seed: layerSeed }),
      ...(first ? { inputShape: [INPUT_SIDE, INPUT_SIDE, CHANNELS] } : {}),
    });
  model.add(conv(8, seed + 1, true));   // 32 -> 16
  model.add(conv(16, seed + 2));        // 16 -> 8
  model.add(conv(32, seed + 3));        // 8 -> 4
  model.add(tf.layers.globalAveragePooling2d({}));
  model.add(tf.layers.dense({
    units: 2, // two logits, argmax decides
    kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 4 }),
  }));
  return model;
}

export async function saveModel(
  model: tf.LayersModel, metadata: ModelMetadata, dir: string): Promise<void> {
  mkdirSync(dir, { recursive: true });
  await model.save(tf.io.withSaveHandler(async (artifacts) => {
    const weightData = artifacts.weightData as ArrayBuffer;
    const manifest = {
      metadata,
      modelTopology: artifacts.modelTopology,
      weightSpecs: artifacts.weightSpecs,
    };
    // write-temp-rename keeps half-written artifacts invisible
    const jsonTmp = path.join(dir, ".model.json.tmp");
    writeFileSync(jsonTmp, JSON.stringify(manifest));
    renameSync(jsonTmp, path.join(dir, "model.json"));
    const binTmp = path.join(dir, ".weights.bin.tmp");
    writeFileSync(binTmp, Buffer.from(weightData));
    renameSync(binTmp, path.join(dir, "weights.bin"));
    return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: "JSON" } };
  }));
}

export async function loadModel(dir: string):
    Promise<{ model: tf.LayersModel; metadata: ModelMetadata }> {
  let manifest: any;
  try {
    manifest = JSON.parse(readFileSync(path.join(dir, "model.json"), "utf-8"));
  } catch (err) {
    throw new IncompatibleModelError(`${dir}: unreadable model artifact (${err})`);
  }
  const metadata = manifest.metadata as ModelMetadata;
  if (!metadata || metadata.kind !== ARTIFACT_KIND || metadata.version !== ARTIFACT_VERSION) {
    throw new IncompatibleModelError(
      `${dir}: expected ${ARTIFACT_KIND} v${ARTIFACT_VERSION} artifact`);
  }
  const weightData = readFileSync(path.join(dir, "weights.bin"));
  const model = await tf.loadLayersModel(tf.io.fromMemory({
    modelTopology: manifest.modelTopology,
    weightSpecs: manifest.weightSpecs,
    weightData: weightData.buffer.slice(
      weightData.byteOffset, weightData.byteOffset + weightData.byteLength),
  }));
  return { model, metadata };
}
