"""Leaf-disease image classification: frozen VGG16 features + random forest."""

from .tensor_ops import ConvKernel, Tensor, conv2d, im2col, maxpool2d, relu
from .vgg import (
    FEATURE_DIM,
    LayerSpec,
    build_architecture,
    extract_batch,
    extract_features,
    total_conv_params,
)
from .weights_io import (
    FeatureCache,
    WeightSet,
    load_cache,
    load_weights,
    write_cache,
    write_weights,
)
from .dataset import (
    LabeledImageSet,
    SplitConfig,
    bilinear_resize,
    preprocess,
    scan_dataset,
    stratified_split,
)
from .forest import (
    Forest,
    ForestParams,
    best_split,
    gini,
    load_forest,
    predict,
    predict_batch,
    save_forest,
    train,
)
from .metrics import (
    ClassMetrics,
    ConfusionMatrix,
    accuracy,
    class_metrics,
    confusion_matrix,
    render_report,
)

__version__ = "0.1.0"
