// Image preprocessing mirroring the classifier pipeline exactly:
// decode -> force RGB -> bilinear resize to 224 (half-pixel centers) -> /255.
// The interpolation runs in float64 with the same separable order (rows,
// then columns) so goldens and pipeline inputs agree to float32 precision.

import * as fs from "fs";
import { PNG } from "pngjs";
import { INPUT_SIZE } from "./architecture";

export interface RgbImage {
  height: number;
  width: number;
  data: Float64Array; // H -> W -> C, values 0..255
}

export function decodePng(path: string): RgbImage {
  const png = PNG.sync.read(fs.readFileSync(path));
  const { width, height } = png;
  const out = new Float64Array(height * width * 3);
  for (let i = 0; i < height * width; i++) {
    out[i * 3] = png.data[i * 4];
    out[i * 3 + 1] = png.data[i * 4 + 1];
    out[i * 3 + 2] = png.data[i * 4 + 2];
  }
  return { height, width, data: out };
}

function axisWeights(inSize: number, outSize: number) {
  const lo = new Int32Array(outSize);
  const hi = new Int32Array(outSize);
  const frac = new Float64Array(outSize);
  for (let i = 0; i < outSize; i++) {
    const coord = (i + 0.5) * (inSize / outSize) - 0.5;
    let l = Math.floor(coord);
    frac[i] = coord - l;
    let h = l + 1;
    if (h < 0) h = 0;
    if (h > inSize - 1) h = inSize - 1;
    if (l < 0) l = 0;
    if (l > inSize - 1) l = inSize - 1;
    lo[i] = l;
    hi[i] = h;
  }
  return { lo, hi, frac };
}

export function bilinearResize(img: RgbImage, outH: number, outW: number): RgbImage {
  const { height: inH, width: inW, data } = img;
  const rows = axisWeights(inH, outH);
  const mid = new Float64Array(outH * inW * 3);
  for (let i = 0; i < outH; i++) {
    const f = rows.frac[i];
    const lo = rows.lo[i] * inW * 3;
    const hi = rows.hi[i] * inW * 3;
    for (let j = 0; j < inW * 3; j++) {
      mid[i * inW * 3 + j] = data[lo + j] * (1.0 - f) + data[hi + j] * f;
    }
  }
  const cols = axisWeights(inW, outW);
  const out = new Float64Array(outH * outW * 3);
  for (let i = 0; i < outH; i++) {
    for (let j = 0; j < outW; j++) {
      const f = cols.frac[j];
      const lo = (i * inW + cols.lo[j]) * 3;
      const hi = (i * inW + cols.hi[j]) * 3;
      for (let c = 0; c < 3; c++) {
        out[(i * outW + j) * 3 + c] = mid[lo + c] * (1.0 - f) + mid[hi + c] * f;
      }
    }
  }
  return { height: outH, width: outW, data: out };
}

export function preprocess(path: string): Float32Array {
  const resized = bilinearResize(decodePng(path), INPUT_SIZE, INPUT_SIZE);
  const out = new Float32Array(resized.data.length);
  for (let i = 0; i < out.length; i++) out[i] = resized.data[i] / 255.0;
  return out;
}
