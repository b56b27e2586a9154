"""Smoothing-kernel keywords.

A keyword reads ``W`` + family letter + order digit + dimension digit + three
reserved digits, e.g. ``Wp52220`` is the 5th-order Wendland kernel normalized
in two dimensions. The reserved digits are kept verbatim and not decoded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from sflsim.errors import CaseAssemblyError

KEYWORD_RE = re.compile(r"^W([a-z])(\d)(\d)(\d{3})$")

FAMILIES = {"p": "wendland"}

REGISTERED_KEYWORDS = ("Wp51220", "Wp52220", "Wp53220")


@dataclass(frozen=True)
class KernelKeyword:
    raw: str
    family: str
    order: int
    dimension: int


def looks_like_kernel_keyword(name: str) -> bool:
    return KEYWORD_RE.match(name) is not None


def decode_kernel_keyword(raw: str) -> KernelKeyword:
    """Decode a registered keyword; unknown keywords list the registered ones."""
    match = KEYWORD_RE.match(raw)
    if raw not in REGISTERED_KEYWORDS or match is None:
        raise CaseAssemblyError(
            f"unknown kernel keyword '{raw}'; registered keywords: {', '.join(REGISTERED_KEYWORDS)}"
        )
    family, order, dimension, _reserved = match.groups()
    return KernelKeyword(raw=raw, family=FAMILIES[family], order=int(order), dimension=int(dimension))
