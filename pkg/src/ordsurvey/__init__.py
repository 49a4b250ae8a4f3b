"""Ordinal survey analysis: OrdEval reinforcement factors, Kano typing, prediction."""

from ordsurvey.dataset import (
    OrdinalDataset,
    Scale,
    SyntheticSpec,
    generate_synthetic,
    parse_dataset,
    serialize_dataset,
    split_labeled,
)
from ordsurvey.kano import classify_attribute, detect_thresholds
from ordsurvey.ordeval import (
    OrdEvalParams,
    ReinforcementProfile,
    attribute_factors,
    distance,
    nearest_neighbors,
    reinforcement_profile,
)
from ordsurvey.significance import SignificanceParams, null_distribution, significance_flags

__version__ = "0.1.0"

__all__ = [
    "OrdinalDataset",
    "Scale",
    "SyntheticSpec",
    "generate_synthetic",
    "parse_dataset",
    "serialize_dataset",
    "split_labeled",
    "OrdEvalParams",
    "ReinforcementProfile",
    "attribute_factors",
    "distance",
    "nearest_neighbors",
    "reinforcement_profile",
    "SignificanceParams",
    "null_distribution",
    "significance_flags",
    "classify_attribute",
    "detect_thresholds",
]
