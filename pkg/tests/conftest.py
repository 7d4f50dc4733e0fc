import numpy as np
import pytest

from leafscan import ConvKernel, Tensor
from leafscan.vgg import conv_layer_specs
from leafscan.weights_io import WeightSet


def random_tensor(rng, h, w, c):
    return Tensor(rng.standard_normal((h, w, c)).astype(np.float32))


def random_kernel(rng, kh, kw, c_in, c_out, bias_scale=1.0):
    w = rng.standard_normal((kh, kw, c_in, c_out)).astype(np.float32)
    b = (bias_scale * rng.standard_normal(c_out)).astype(np.float32)
    return ConvKernel(w, b)


def make_weight_set(seed=0, weight_scale="he"):
    """Random VGG16-shaped WeightSet; He scaling keeps activations bounded."""
    rng = np.random.default_rng(seed)
    layers = []
    for spec in conv_layer_specs():
        if weight_scale == "he":
            std = np.sqrt(2.0 / (9 * spec.c_in))
        else:
            std = float(weight_scale)
        w = rng.normal(0.0, std, (3, 3, spec.c_in, spec.c_out)).astype(np.float32)
        b = rng.normal(0.0, 0.01, spec.c_out).astype(np.float32)
        layers.append((spec.name, ConvKernel(w, b)))
    return WeightSet(tuple(layers))


@pytest.fixture(scope="session")
def vgg_weights():
    return make_weight_set(seed=1234)


@pytest.fixture(scope="session")
def gvgg_path(tmp_path_factory, vgg_weights):
    from leafscan.weights_io import write_weights

    path = tmp_path_factory.mktemp("weights") / "vgg16.gvgg"
    write_weights(vgg_weights, path)
    return path


def make_image_dataset(root, per_class, size=32, n_classes=4, seed=7):
    """Synthetic class-per-directory dataset with class-distinct color stats."""
    from PIL import Image

    rng = np.random.default_rng(seed)
    names = [f"class_{c}" for c in range(n_classes)]
    for label, name in enumerate(names):
        d = root / name
        d.mkdir(parents=True)
        base = np.zeros(3)
        base[label % 3] = 160.0
        base[(label + 1) % 3] = 40.0 * (label // 3)
        for i in range(per_class):
            noise = rng.integers(-40, 40, (size, size, 3))
            pixels = np.clip(base + noise, 0, 255).astype(np.uint8)
            Image.fromarray(pixels).save(d / f"img_{i:03d}.png")
    return names


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("dataset")
    make_image_dataset(root, per_class=2)
    return root
