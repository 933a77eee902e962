"""brkit: large spaces of bounded-rank symmetric and alternating matrices over small finite fields.

Finite-field arithmetic, matrix spaces and their hyperplane data, the
compression models WS_{n,s,t} and WA_{n,s,t}, a certifying recognizer with an
exhaustive oracle, and seeded check suites.
"""
__version__ = "0.1.0"

from .errors import BrkitError
from .field import Field, field_make
from .models import CompressionModel, model_dim, model_space, model_urk, thresholds
from .recognize import CongruenceCert, RecognitionOutcome, oracle_recognize, recognize, verify_cert
from .space import MatSpace, Hyperplane, min_dim_sh, read_space, space_make, urk, write_space

__all__ = [
    "BrkitError", "CompressionModel", "CongruenceCert", "Field", "Hyperplane", "MatSpace",
    "RecognitionOutcome", "field_make", "min_dim_sh", "model_dim", "model_space", "model_urk",
    "oracle_recognize", "read_space", "recognize", "space_make", "thresholds", "urk", "verify_cert",
    "write_space", "__version__",
]
