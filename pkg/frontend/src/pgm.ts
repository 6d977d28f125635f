// Binary portable-graymap reader for the 16x16 histogram images.

import { readFileSync } from "fs";

export const SIDE = 16;
export const MAXVAL = 255;

export class MalformedDatasetError extends Error {}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d || byte === 0x0c;
}

/** Parse a P5 graymap, returning its 256 pixels row-major. Header comments
 * are tolerated; anything other than 16x16 maxval-255 is rejected. */
export function readPgm(path: string): Uint8Array {
  const data = readFileSync(path);
  const tokens: string[] = [];
  let pos = 0;
  while (tokens.length < 4 && pos < data.length) {
    if (isSpace(data[pos])) {
      pos += 1;
      continue;
    }
    if (data[pos] === 0x23) { // '#'
      while (pos < data.length && data[pos] !== 0x0a) pos += 1;
      continue;
    }
    let end = pos;
    while (end < data.length && !isSpace(data[end])) end += 1;
    tokens.push(data.subarray(pos, end).toString("ascii"));
    pos = end;
  }
  if (tokens.length < 4) {
    throw new MalformedDatasetError(`${path}: truncated graymap header`);
  }
  const [magic, w, h, maxval] = tokens;
  if (magic !== "P5") {
    throw new MalformedDatasetError(`${path}: not a binary graymap (magic ${magic})`);
  }
  if (Number(w) !== SIDE || Number(h) !== SIDE) {
    throw new MalformedDatasetError(`${path}: expected ${SIDE}x${SIDE}, got ${w}x${h}`);
  }
  if (Number(maxval) !== MAXVAL) {
    throw new MalformedDatasetError(`${path}: expected maxval ${MAXVAL}, got ${maxval}`);
  }
  const raster = data.subarray(pos + 1, pos + 1 + SIDE * SIDE); // single space after maxval
  if (raster.length !== SIDE * SIDE) {
    throw new MalformedDatasetError(`${path}: raster shorter than ${SIDE * SIDE} bytes`);
  }
  return new Uint8Array(raster);
}
