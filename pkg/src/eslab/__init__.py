"""Event structures, their orthogonality graphs, and nice labellings."""

from eslab.core import EventStructure, RelationKind, build
from eslab.errors import EsError
from eslab.gen import GenParams, fixture, gen_forest, gen_random, gen_simple
from eslab.graph import Coloring, OrthoGraph, chromatic_exact, degree, ortho_graph
from eslab.io import load_es, parse_es, serialize_es
from eslab.labelling import STRATEGIES, Labelling, label, verify_labelling

__version__ = "0.1.0"

__all__ = [
    "Coloring",
    "EsError",
    "EventStructure",
    "GenParams",
    "Labelling",
    "OrthoGraph",
    "RelationKind",
    "STRATEGIES",
    "build",
    "chromatic_exact",
    "degree",
    "fixture",
    "gen_forest",
    "gen_random",
    "gen_simple",
    "label",
    "load_es",
    "ortho_graph",
    "parse_es",
    "serialize_es",
    "verify_labelling",
]
