import { describe, expect, it } from "vitest";

import { CHANNEL_MEAN, CHANNEL_STD, toInputTensor } from "../src/preprocess";

describe("toInputTensor", () => {
  it("upsamples to 32x32x3 and normalizes", async () => {
    const black = new Uint8Array(256);
    const white = new Uint8Array(256).fill(255);
    const t = toInputTensor([black, white]);
    expect(t.shape).toEqual([2, 32, 32, 3]);
    const data = await t.data();
    const lo = (0 - CHANNEL_MEAN) / CHANNEL_STD;
    const hi = (1 - CHANNEL_MEAN) / CHANNEL_STD;
    expect(data[0]).toBeCloseTo(lo, 6);
    expect(data[2 * 32 * 32 * 3 - 1]).toBeCloseTo(hi, 6);
    t.dispose();
  });

  it("replicates one histogram bin into a 2x2 block on all channels", async () => {
    const pixels = new Uint8Array(256);
    pixels[0] = 255; // byte 0x00 -> rows 0-1, cols 0-1 after nearest upsample
    const t = toInputTensor([pixels]);
    const arr = await t.array() as number[][][][];
    const hi = (1 - CHANNEL_MEAN) / CHANNEL_STD;
    for (const [r, c] of [[0, 0], [0, 1], [1, 0], [1, 1]]) {
      for (let ch = 0; ch < 3; ch++) {
        expect(arr[0][r][c][ch]).toBeCloseTo(hi, 6);
      }
    }
    expect(arr[0][0][2][0]).toBeCloseTo((0 - CHANNEL_MEAN) / CHANNEL_STD, 6);
    t.dispose();
  });

  it("rejects wrong pixel counts", () => {
    expect(() => toInputTensor([new Uint8Array(100)])).toThrow(/pixels/);
  });
});
