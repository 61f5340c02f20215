"""REST request coding with random linear network coding over GF(256)."""

from .analysis import AnalysisPoint, a_wnc, a_wonc, sweep
from .client import NcClient
from .codec import (
    CodedMessage,
    CodingHeader,
    NativeMessage,
    NcResponse,
    combine,
    deserialize,
    deserialize_response,
    prune,
    serialize,
    serialize_response,
)
from .server import DecodingMatrix, NcServer
from .sim import LossModel, SimResult, run_nc, run_rest_baseline

__all__ = [
    "AnalysisPoint", "CodedMessage", "CodingHeader", "DecodingMatrix", "LossModel",
    "NativeMessage", "NcClient", "NcResponse", "NcServer", "SimResult",
    "a_wnc", "a_wonc", "combine", "deserialize", "deserialize_response", "prune",
    "run_nc", "run_rest_baseline", "serialize", "serialize_response", "sweep",
]
__version__ = "0.1.0"
