"""Dense linear algebra over F_2 with rows packed into Python ints."""

from __future__ import annotations

from typing import Iterable


def row_reduce(rows: Iterable[int]) -> dict[int, int]:
    """Echelon basis of the span, keyed by leading bit."""
    basis: dict[int, int] = {}
    for r in rows:
        r = reduce_against(r, basis)
        if r:
            lead = r.bit_length() - 1
            # keep the basis fully reduced so reduce_against is a single pass
            for k, b in list(basis.items()):
                if (b >> lead) & 1:
                    basis[k] = b ^ r
            basis[lead] = r
    return basis


def reduce_against(r: int, basis: dict[int, int]) -> int:
    while r:
        lead = r.bit_length() - 1
        b = basis.get(lead)
        if b is None:
            return r
        r ^= b
    return r


def rank(rows: Iterable[int]) -> int:
    return len(row_reduce(rows))


def kernel(columns: list[int], n_rows: int) -> list[int]:
    """Basis of {v : sum v_i columns[i] = 0}, each v as a bitmask over columns."""
    # augment every column with an identity tag above the n_rows data bits
    basis: dict[int, tuple[int, int]] = {}
    null = []
    for i, col in enumerate(columns):
        vec, tag = col, 1 << i
        while vec:
            lead = vec.bit_length() - 1
            if lead not in basis:
                break
            bvec, btag = basis[lead]
            vec ^= bvec
            tag ^= btag
        if vec:
            basis[vec.bit_length() - 1] = (vec, tag)
        else:
            null.append(tag)
    return null


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out
