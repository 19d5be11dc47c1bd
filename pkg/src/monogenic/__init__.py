"""Monogenic-signal edge detection toolkit.

Poisson scale-space construction of monogenic fields, their local
phase/attenuation features, four phase-based edge-gradient methods with a
Canny-style thinning pipeline, and a numerical verifier for the analytic
identities the methods rest on.
"""

from . import clifford, edgeops, errors, features, fixtures, imageio, scalespace, verify
from .edgeops import DetectorConfig, EdgeMap, GradientMap, detect
from .scalespace import MonogenicField, ScalarField, VectorField, monogenic_scale

__all__ = [
    "clifford", "edgeops", "errors", "features", "fixtures", "imageio",
    "scalespace", "verify",
    "DetectorConfig", "EdgeMap", "GradientMap", "detect",
    "MonogenicField", "ScalarField", "VectorField", "monogenic_scale",
]

__version__ = "0.1.0"
