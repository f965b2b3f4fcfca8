"""Background subtraction and traffic-density benchmarking."""
from .bgmodels import (
    ALGORITHMS,
    FrameDifference,
    GaussianComponent,
    MixtureModel,
    MogParams,
    StaticBackground,
    framediff_observe,
    gaussian_density,
    make_model,
    mixture_probability,
    mog_observe,
    staticbg_observe,
)
from .density import DensityRecord, PerspectiveWeights, build_weights, weighted_density
from .evaluation import AccuracyReport, evaluate, least_squares_fit, load_ground_truth, pearson
from .imaging import Frame, SequenceManifest, decode_pnm, encode_pnm, load_manifest, to_samples
from .pipeline import Pipeline, PipelineConfig, run_sequence
from .postproc import BlobLabeling, StructuringElement, dilate, erode, filter_small_blobs, label_blobs, opening

__version__ = "0.1.0"
