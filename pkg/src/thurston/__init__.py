"""Combinatorial Thurston maps on punctured spheres.

Free groups and their automorphisms, mapping classes, branched-cover
presentations, obstructions, Hurwitz classes and a certificate-producing
equivalence test.  See ``thurston.cli`` for the command line.
"""

from .branched_cover import CoverPresentation
from .errors import ThurstonError
from .formats import emit_presentation, parse_presentation
from .mapping_class import MappingClass
from .pipeline import Config, EquivalenceCertificate, GeometrizationOracle, check_equivalence
from .sphere import CurveClass, Multicurve, PuncturedSphere

__all__ = ["CoverPresentation", "ThurstonError", "emit_presentation", "parse_presentation", "MappingClass",
           "Config", "EquivalenceCertificate", "GeometrizationOracle", "check_equivalence", "CurveClass",
           "Multicurve", "PuncturedSphere"]
