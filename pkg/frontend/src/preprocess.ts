// Input contract for the classifier: upsample the 16x16 histogram image to
// 32x32 with nearest-neighbor (each bin becomes a 2x2 block, preserving bin
// semantics), replicate the gray channel to 3 channels, then normalize each
// channel with fixed constants.

import * as tf from "@tensorflow/tfjs";

import { SIDE } from "./pgm";

export const INPUT_SIDE = 32;
export const CHANNELS = 3;
export const CHANNEL_MEAN = 0.5;
export const CHANNEL_STD = 0.5;

/** Stack chunk images into a normalized [n, 32, 32, 3] float tensor. */
export function toInputTensor(images: Uint8Array[]): tf.Tensor4D {
  return tf.tidy(() => {
    const flat = new Float32Array(images.length * SIDE * SIDE);
    images.forEach((pixels, i) => {
      if (pixels.length !== SIDE * SIDE) {
        throw new Error(`image ${i} has ${pixels.length} pixels, expected ${SIDE * SIDE}`);
      }
      flat.set(pixels, i * SIDE * SIDE);
    });
    const gray = tf.tensor4d(flat, [images.length, SIDE, SIDE, 1]).div(255);
    const up = tf.image.resizeNearestNeighbor(
      gray as tf.Tensor4D, [INPUT_SIDE, INPUT_SIDE]);
    const rgb = tf.concat([up, up, up], 3);
    return rgb.sub(CHANNEL_MEAN).div(CHANNEL_STD) as tf.Tensor4D;
  });
}
