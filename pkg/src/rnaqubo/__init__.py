"""RNA secondary structure prediction as quadratic unconstrained binary optimisation."""

from .models import Model1Params, Model2Params, Model3Params, Qubo, build, energy, load_preset
from .pipeline import FoldSettings, SolverSettings, predict
from .scoring import SecondaryStructure, mcc, score
from .seq_model import RnaSequence, parse_sequence

__version__ = "0.1.0"

__all__ = [
    "FoldSettings",
    "Model1Params",
    "Model2Params",
    "Model3Params",
    "Qubo",
    "RnaSequence",
    "SecondaryStructure",
    "SolverSettings",
    "build",
    "energy",
    "load_preset",
    "mcc",
    "parse_sequence",
    "predict",
    "score",
]
