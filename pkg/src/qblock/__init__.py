"""Compile block-encodings of matrices and operators into circuits and verify them by simulation."""

from .approx import ChebSeries, InversePlan, inverse_series, jacobi_anger, sup_norm_rescale
from .circuit import Circuit, CircuitError, Gate, Register, ResourceReport
from .encoding import BlockEncoding, EncodingError, PauliSum, X, Y, Z, from_array, from_eye, \
    from_lcu, from_operator, from_projector
from .gqsp import GQSPPhases, find_phases, gqet
from .simulator import PostSelectResult, SimulationError, extract_block

__all__ = [
    "BlockEncoding", "ChebSeries", "Circuit", "CircuitError", "EncodingError", "GQSPPhases", "Gate",
    "InversePlan", "PauliSum", "PostSelectResult", "Register", "ResourceReport", "SimulationError",
    "X", "Y", "Z", "extract_block", "find_phases", "from_array", "from_eye", "from_lcu",
    "from_operator", "from_projector", "gqet", "inverse_series", "jacobi_anger", "sup_norm_rescale",
]
