import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { MalformedDatasetError, readPgm } from "../src/pgm";
import { oneHotImage, writePgm } from "./helpers";
import { mulberry32 } from "../src/train";

const dir = mkdtempSync(path.join(tmpdir(), "pgm-"));

describe("readPgm", () => {
  it("round-trips pixel data", () => {
    const pixels = oneHotImage(mulberry32(1));
    const file = writePgm(dir, "a.pgm", pixels);
    expect(readPgm(file)).toEqual(pixels);
  });

  it("tolerates header comments", () => {
    const pixels = new Uint8Array(256).fill(7);
    const file = path.join(dir, "c.pgm");
    writeFileSync(file, Buffer.concat([
      Buffer.from("P5\n# comment\n16 16\n255\n"), Buffer.from(pixels)]));
    expect(readPgm(file)).toEqual(pixels);
  });

  it("rejects wrong magic", () => {
    const file = path.join(dir, "m.pgm");
    writeFileSync(file, Buffer.concat([Buffer.from("P6\n16 16\n255\n"),
                                       Buffer.alloc(768)]));
    expect(() => readPgm(file)).toThrow(MalformedDatasetError);
  });

  it("rejects wrong dimensions", () => {
    const file = path.join(dir, "d.pgm");
    writeFileSync(file, Buffer.concat([Buffer.from("P5\n15 16\n255\n"),
                                       Buffer.alloc(240)]));
    expect(() => readPgm(file)).toThrow(/expected 16x16/);
  });

  it("rejects wrong maxval", () => {
    const file = path.join(dir, "v.pgm");
    writeFileSync(file, Buffer.concat([Buffer.from("P5\n16 16\n65535\n"),
                                       Buffer.alloc(512)]));
    expect(() => readPgm(file)).toThrow(/maxval/);
  });

  it("rejects truncated raster", () => {
    const file = path.join(dir, "t.pgm");
    writeFileSync(file, Buffer.concat([Buffer.from("P5\n16 16\n255\n"),
                                       Buffer.alloc(100)]));
    expect(() => readPgm(file)).toThrow(/raster/);
  });
});
