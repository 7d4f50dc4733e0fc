import { describe, expect, it } from "vitest";
import { crc32 } from "../src/crc32";
import { decodeGvgg, encodeGfch, encodeGvgg } from "../src/binary";
import { syntheticWeights, totalParams } from "../src/weights";
import { convLayers } from "../src/architecture";

describe("crc32", () => {
  it("matches the zlib reference value for a known string", () => {
    // zlib.crc32(b"123456789") == 0xCBF43926
    expect(crc32(Buffer.from("123456789", "ascii"))).toBe(0xcbf43926);
  });

  it("detects a single flipped byte", () => {
    const data = Buffer.from("hello golden fixtures", "utf-8");
    const base = crc32(data);
    for (let i = 0; i < data.length; i++) {
      const copy = Buffer.from(data);
      copy[i] ^= 0x01;
      expect(crc32(copy)).not.toBe(base);
    }
  });
});

describe("architecture", () => {
  it("has 13 conv layers with the VGG16 channel chain", () => {
    const layers = convLayers();
    expect(layers.length).toBe(13);
    expect(layers[0]).toEqual({ name: "block1_conv1", cIn: 3, cOut: 64 });
    expect(layers[12]).toEqual({ name: "block5_conv3", cIn: 512, cOut: 512 });
  });

  it("totals 14,714,688 parameters", () => {
    expect(totalParams(syntheticWeights(1))).toBe(14_714_688);
  });
});

describe("gvgg encoding", () => {
  it("round-trips bit-exactly", () => {
    const layers = syntheticWeights(7);
    const decoded = decodeGvgg(encodeGvgg(layers));
    expect(decoded.length).toBe(13);
    for (let i = 0; i < 13; i++) {
      expect(decoded[i].name).toBe(layers[i].name);
      expect(
        Buffer.from(decoded[i].weights.buffer).equals(
          Buffer.from(layers[i].weights.buffer),
        ),
      ).toBe(true);
      expect(
        Buffer.from(decoded[i].bias.buffer).equals(
          Buffer.from(layers[i].bias.buffer),
        ),
      ).toBe(true);
    }
  });

  it("is deterministic for a fixed seed", () => {
    const a = encodeGvgg(syntheticWeights(42));
    const b = encodeGvgg(syntheticWeights(42));
    expect(a.equals(b)).toBe(true);
  });

  it("differs across seeds", () => {
    const a = encodeGvgg(syntheticWeights(1));
    const b = encodeGvgg(syntheticWeights(2));
    expect(a.equals(b)).toBe(false);
  });

  it("block1_conv1 has shape 3x3x3x64", () => {
    const first = decodeGvgg(encodeGvgg(syntheticWeights(3)))[0];
    expect([first.kh, first.kw, first.cIn, first.cOut]).toEqual([3, 3, 3, 64]);
  });
});

describe("gfch encoding", () => {
  it("rejects rows with the wrong dimension", () => {
    expect(() =>
      encodeGfch(["a"], 8, [
        { label: 0, sourcePath: "x.png", features: new Float32Array(7) },
      ]),
    ).toThrow();
  });

  it("encodes header fields little-endian", () => {
    const buf = encodeGfch(["a", "b"], 4, [
      { label: 1, sourcePath: "x.png", features: new Float32Array(4) },
    ]);
    expect(buf.subarray(0, 4).toString("ascii")).toBe("GFCH");
    expect(buf.readUInt32LE(4)).toBe(1); // version
    expect(buf.readUInt32LE(8)).toBe(2); // class count
  });
});
