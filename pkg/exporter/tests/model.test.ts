import { describe, expect, it } from "vitest";
import { bilinearResize, RgbImage } from "../src/preprocess";
import { extractFeatures } from "../src/model";
import { syntheticWeights } from "../src/weights";
import { FEATURE_DIM, INPUT_SIZE } from "../src/architecture";
import { Rng } from "../src/rng";

function naiveBilinear(img: RgbImage, outH: number, outW: number): Float64Array {
  const out = new Float64Array(outH * outW * 3);
  for (let i = 0; i < outH; i++) {
    for (let j = 0; j < outW; j++) {
      const sy = (i + 0.5) * (img.height / outH) - 0.5;
      const sx = (j + 0.5) * (img.width / outW) - 0.5;
      const clamp = (v: number, max: number) => Math.min(Math.max(v, 0), max);
      const y0 = clamp(Math.floor(sy), img.height - 1);
      const y1 = clamp(Math.floor(sy) + 1, img.height - 1);
      const x0 = clamp(Math.floor(sx), img.width - 1);
      const x1 = clamp(Math.floor(sx) + 1, img.width - 1);
      const fy = sy - Math.floor(sy);
      const fx = sx - Math.floor(sx);
      for (let c = 0; c < 3; c++) {
        const at = (y: number, x: number) => img.data[(y * img.width + x) * 3 + c];
        const top = at(y0, x0) * (1 - fx) + at(y0, x1) * fx;
        const bot = at(y1, x0) * (1 - fx) + at(y1, x1) * fx;
        out[(i * outW + j) * 3 + c] = top * (1 - fy) + bot * fy;
      }
    }
  }
  return out;
}

describe("bilinear resize", () => {
  it("matches a naive per-pixel oracle", () => {
    const rng = new Rng(5);
    const img: RgbImage = {
      height: 13,
      width: 9,
      data: Float64Array.from({ length: 13 * 9 * 3 }, () => rng.next() * 255),
    };
    const got = bilinearResize(img, 29, 31).data;
    const want = naiveBilinear(img, 29, 31);
    for (let i = 0; i < want.length; i++) {
      expect(Math.abs(got[i] - want[i])).toBeLessThan(1e-9);
    }
  });

  it("keeps constant images constant", () => {
    const img: RgbImage = {
      height: 4,
      width: 6,
      data: new Float64Array(4 * 6 * 3).fill(42),
    };
    const out = bilinearResize(img, 10, 10).data;
    for (const v of out) expect(v).toBeCloseTo(42, 10);
  });
});

describe("reference forward pass", () => {
  it("produces 25088 finite non-negative features", async () => {
    const layers = syntheticWeights(99);
    const rng = new Rng(3);
    const image = Float32Array.from(
      { length: INPUT_SIZE * INPUT_SIZE * 3 },
      () => rng.next(),
    );
    const features = await extractFeatures(image, layers);
    expect(features.length).toBe(FEATURE_DIM);
    for (const v of features) {
      expect(Number.isFinite(v)).toBe(true);
      expect(v).toBeGreaterThanOrEqual(0);
    }
  }, 300_000);

  it("is deterministic", async () => {
    const layers = syntheticWeights(99);
    const image = new Float32Array(INPUT_SIZE * INPUT_SIZE * 3).fill(0.5);
    const a = await extractFeatures(image, layers);
    const b = await extractFeatures(image, layers);
    expect(Buffer.from(a.buffer).equals(Buffer.from(b.buffer))).toBe(true);
  }, 300_000);
});
