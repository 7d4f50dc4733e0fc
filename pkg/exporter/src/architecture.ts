// VGG16 convolutional stack: 13 conv layers in 5 blocks, pool after each block.

export interface ConvSpec {
  name: string;
  cIn: number;
  cOut: number;
}

const BLOCKS: Array<[number, number, number]> = [
  [1, 2, 64],
  [2, 2, 128],
  [3, 3, 256],
  [4, 3, 512],
  [5, 3, 512],
];

export function convLayers(): ConvSpec[] {
  const layers: ConvSpec[] = [];
  let cIn = 3;
  for (const [block, nConvs, cOut] of BLOCKS) {
    for (let i = 1; i <= nConvs; i++) {
      layers.push({ name: `block${block}_conv${i}`, cIn, cOut });
      cIn = cOut;
    }
  }
  return layers;
}

export const FEATURE_DIM = 7 * 7 * 512;
export const INPUT_SIZE = 224;
