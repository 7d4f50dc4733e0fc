// Reference forward pass through the 13-conv VGG16 stack using tfjs ops.
// Input and kernels are HWC / [kh, kw, cIn, cOut], matching the GVGG layout,
// so no axis reordering is needed.

import * as tf from "@tensorflow/tfjs";
import { ConvLayerWeights } from "./binary";
import { FEATURE_DIM, INPUT_SIZE } from "./architecture";

export async function extractFeatures(
  image: Float32Array,
  layers: ConvLayerWeights[],
): Promise<Float32Array> {
  if (image.length !== INPUT_SIZE * INPUT_SIZE * 3) {
    throw new Error(`expected ${INPUT_SIZE}x${INPUT_SIZE}x3 input`);
  }
  const result = tf.tidy(() => {
    let x = tf.tensor4d(image, [1, INPUT_SIZE, INPUT_SIZE, 3]);
    let convIdx = 0;
    for (let block = 0; block < 5; block++) {
      const convsInBlock = block < 2 ? 2 : 3;
      for (let i = 0; i < convsInBlock; i++) {
        const layer = layers[convIdx++];
        const kernel = tf.tensor4d(layer.weights, [3, 3, layer.cIn, layer.cOut]);
        const bias = tf.tensor1d(layer.bias);
        x = tf.relu(tf.add(tf.conv2d(x, kernel, 1, "same"), bias));
      }
      x = tf.maxPool(x, 2, 2, "valid");
    }
    return x;
  });
  const data = (await result.data()) as Float32Array;
  result.dispose();
  if (data.length !== FEATURE_DIM) {
    throw new Error(`unexpected feature length ${data.length}`);
  }
  return Float32Array.from(data);
}
