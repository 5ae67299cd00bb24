"""Finite Möbius-plane cipher, projective-plane authentication and their analysis."""
from .analysis import (
    AvalancheMatrix,
    ProbabilityReport,
    aposteriori_tables,
    cipher_completeness_matrix,
    perfectness_deviation,
)
from .cipher import CipherTriple, KeyTriple, LineKeyPoints, MessageTriple, MoebiusCipher
from .field import ExtCtx, FieldCtx, enumerate_field, ext_make, extension_for, field_arith, field_make
from .plane import INF, Circle, MoebiusPlane, PlaneAudit
from .proj_auth import AuthContext, ProjectivePlane, auth_completeness_matrix, forgery_stats
from .stream import Container, decode_points, decrypt_stream, encode_bytes, encrypt_stream

__version__ = "0.1.0"

__all__ = [
    "AuthContext",
    "AvalancheMatrix",
    "CipherTriple",
    "Circle",
    "Container",
    "ExtCtx",
    "FieldCtx",
    "INF",
    "KeyTriple",
    "LineKeyPoints",
    "MessageTriple",
    "MoebiusCipher",
    "MoebiusPlane",
    "PlaneAudit",
    "ProbabilityReport",
    "ProjectivePlane",
    "aposteriori_tables",
    "auth_completeness_matrix",
    "cipher_completeness_matrix",
    "decode_points",
    "decrypt_stream",
    "encode_bytes",
    "encrypt_stream",
    "enumerate_field",
    "ext_make",
    "extension_for",
    "field_arith",
    "field_make",
    "forgery_stats",
    "perfectness_deviation",
]
