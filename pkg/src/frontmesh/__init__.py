"""Guaranteed-quality Delaunay refinement with feature-size-graded segment splitting."""
from importlib import resources

from .geometry import Circle, Point2, circumcircle, incircle, min_angle, orient2d, radius_edge_ratio
from .pslg import Pslg, parse_poly, read_poly, validate

__version__ = "0.1.0"

CORPUS = ("square", "square_hole", "wedge20")


def corpus_path(name: str):
    return resources.files(__name__).joinpath("corpus", f"{name}.poly")


def load_corpus(name: str) -> Pslg:
    return parse_poly(corpus_path(name).read_bytes())


__all__ = ["Circle", "Point2", "Pslg", "circumcircle", "corpus_path", "incircle", "load_corpus",
           "min_angle", "orient2d", "parse_poly", "radius_edge_ratio", "read_poly", "validate"]
