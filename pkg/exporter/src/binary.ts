// Little-endian binary writers for the GVGG weight file and the GFCH
// feature file. Both end in a CRC32 over everything after the 4-byte magic.

import { crc32 } from "./crc32";

export const FORMAT_VERSION = 1;

export class ByteWriter {
  private chunks: Buffer[] = [];

  raw(b: Buffer): void {
    this.chunks.push(b);
  }

  u16(v: number): void {
    const b = Buffer.alloc(2);
    b.writeUInt16LE(v);
    this.chunks.push(b);
  }

  u32(v: number): void {
    const b = Buffer.alloc(4);
    b.writeUInt32LE(v >>> 0);
    this.chunks.push(b);
  }

  text(s: string): void {
    const b = Buffer.from(s, "utf-8");
    this.u16(b.length);
    this.raw(b);
  }

  f32Array(arr: Float32Array): void {
    const b = Buffer.alloc(arr.length * 4);
    for (let i = 0; i < arr.length; i++) b.writeFloatLE(arr[i], i * 4);
    this.raw(b);
  }

  finish(magic: string): Buffer {
    const payload = Buffer.concat(this.chunks);
    const trailer = Buffer.alloc(4);
    trailer.writeUInt32LE(crc32(payload));
    return Buffer.concat([Buffer.from(magic, "ascii"), payload, trailer]);
  }
}

export interface ConvLayerWeights {
  name: string;
  kh: number;
  kw: number;
  cIn: number;
  cOut: number;
  weights: Float32Array; // kh -> kw -> cIn -> cOut order
  bias: Float32Array;
}

export function encodeGvgg(layers: ConvLayerWeights[]): Buffer {
  const w = new ByteWriter();
  w.u32(FORMAT_VERSION);
  w.u32(layers.length);
  for (const layer of layers) {
    w.text(layer.name);
    w.u32(layer.kh);
    w.u32(layer.kw);
    w.u32(layer.cIn);
    w.u32(layer.cOut);
    w.f32Array(layer.weights);
    w.f32Array(layer.bias);
  }
  return w.finish("GVGG");
}

export interface GoldenSample {
  label: number;
  sourcePath: string;
  features: Float32Array;
}

export function encodeGfch(
  classNames: string[],
  dim: number,
  samples: GoldenSample[],
): Buffer {
  const w = new ByteWriter();
  w.u32(FORMAT_VERSION);
  w.u32(classNames.length);
  for (const name of classNames) w.text(name);
  w.u32(dim);
  w.u32(samples.length);
  for (const s of samples) {
    if (s.features.length !== dim) {
      throw new Error(`sample ${s.sourcePath}: ${s.features.length} != dim ${dim}`);
    }
    w.u32(s.label);
    w.text(s.sourcePath);
    w.f32Array(s.features);
  }
  return w.finish("GFCH");
}

// Minimal GVGG reader used by the exporter's own tests.
export function decodeGvgg(buf: Buffer): ConvLayerWeights[] {
  if (buf.subarray(0, 4).toString("ascii") !== "GVGG") throw new Error("bad magic");
  const stored = buf.readUInt32LE(buf.length - 4);
  const actual = crc32(buf.subarray(4, buf.length - 4));
  if (stored !== actual) throw new Error("CRC mismatch");
  let pos = 4;
  const u32 = () => {
    const v = buf.readUInt32LE(pos);
    pos += 4;
    return v;
  };
  if (u32() !== FORMAT_VERSION) throw new Error("bad version");
  const count = u32();
  const layers: ConvLayerWeights[] = [];
  for (let i = 0; i < count; i++) {
    const nameLen = buf.readUInt16LE(pos);
    pos += 2;
    const name = buf.subarray(pos, pos + nameLen).toString("utf-8");
    pos += nameLen;
    const kh = u32();
    const kw = u32();
    const cIn = u32();
    const cOut = u32();
    const nWeights = kh * kw * cIn * cOut;
    const weights = new Float32Array(nWeights);
    for (let j = 0; j < nWeights; j++, pos += 4) weights[j] = buf.readFloatLE(pos);
    const bias = new Float32Array(cOut);
    for (let j = 0; j < cOut; j++, pos += 4) bias[j] = buf.readFloatLE(pos);
    layers.push({ name, kh, kw, cIn, cOut, weights, bias });
  }
  return layers;
}
