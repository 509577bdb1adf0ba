"""chromaterm: fuzzy colour naming with ellipsoidal categories in CIELAB."""

__version__ = "0.1.0"

from .adaptation import AdaptationConfig, adapt_model, mean_chroma_deviation
from .colourspace import D65, LabColour, SrgbColour, WhitePoint, lab_to_srgb, srgb_to_lab
from .errors import ChromatermError, DataError, NumericsError
from .evaluation import (
    ChartNamingReference,
    DatasetReport,
    MunsellChart,
    evaluate_chart,
    evaluate_dataset,
    load_chart,
    load_reference,
    render_chart_segmentation,
    true_positive_ratio,
)
from .fitting import (
    FitConfig,
    LabelledExample,
    MembershipGroundTruth,
    ParameterBounds,
    average_ground_truths,
    build_ground_truth,
    extend_model,
    fit_model,
    fit_objective,
    fit_term,
    ground_truth_from_model,
    initialise_term,
)
from .model import (
    CANONICAL_TERMS,
    ColourModel,
    ColourTerm,
    Ellipsoid,
    belongingness,
    half_height_distance,
    membership_vector,
    model_memberships,
    name_image,
    name_pixel,
    name_points,
    rotation_matrix,
)
from .modelio import read_model, write_model

__all__ = [
    "AdaptationConfig",
    "CANONICAL_TERMS",
    "ChartNamingReference",
    "ChromatermError",
    "ColourModel",
    "ColourTerm",
    "D65",
    "DataError",
    "DatasetReport",
    "Ellipsoid",
    "FitConfig",
    "LabColour",
    "LabelledExample",
    "MembershipGroundTruth",
    "MunsellChart",
    "NumericsError",
    "ParameterBounds",
    "SrgbColour",
    "WhitePoint",
    "adapt_model",
    "average_ground_truths",
    "belongingness",
    "build_ground_truth",
    "evaluate_chart",
    "evaluate_dataset",
    "extend_model",
    "fit_model",
    "fit_objective",
    "fit_term",
    "ground_truth_from_model",
    "half_height_distance",
    "initialise_term",
    "lab_to_srgb",
    "load_chart",
    "load_reference",
    "mean_chroma_deviation",
    "membership_vector",
    "model_memberships",
    "name_image",
    "name_pixel",
    "name_points",
    "read_model",
    "render_chart_segmentation",
    "rotation_matrix",
    "srgb_to_lab",
    "true_positive_ratio",
    "write_model",
]
