"""Bruhat decomposition and sign-balance toolkit for GL_n(F_q) and Sp_2n(Z_2)."""

from .balance import imbalance_gl, imbalance_sp
from .bruhat import decompose, decompose_sp
from .ff import make_spec, parse_field
from .matgroup import Mat, from_rows

__all__ = ["Mat", "decompose", "decompose_sp", "from_rows", "imbalance_gl", "imbalance_sp", "make_spec", "parse_field"]
