"""Keyed rounded inner-product functions over Z_q.

Z_q is split into c = ceil(q/b) contiguous blocks starting at offset a:
blocks 0..c-2 have size b, the final block keeps the remaining b - d
elements, where d = c*b - q. The function maps x to the index of the
block containing <x, k> mod q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import zq
from .zq import ZqVector


@dataclass(frozen=True)
class LrfParams:
    """Block-partition geometry: modulus q, key dimension n, offset a,
    block size b; c and d are derived."""

    q: int
    n: int
    a: int
    b: int
    c: int = 0
    d: int = 0

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"modulus must be >= 2, got {self.q}")
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if not 0 <= self.a < self.q:
            raise ValueError(f"offset {self.a} out of range for Z_{self.q}")
        if not 1 <= self.b <= self.q - 1:
            raise ValueError(f"block size must lie in 1..{self.q - 1}, got {self.b}")
        c = -(-self.q // self.b)
        d = c * self.b - self.q
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class LrfKey:
    """Key vector; recovery guarantees need a unit entry (checked, not forced)."""

    k: ZqVector

    @property
    def has_unit(self) -> bool:
        return zq.has_unit_entry(self.k)


def block_index(z, params: LrfParams):
    """Index v of the block of Z_q containing residue z.

    Closed form min(((z - a) mod q) // b, c - 1); the clamp realizes the
    shortened final block. Accepts scalars or arrays of residues.
    """
    z = np.asarray(z)
    if np.any(z < 0) or np.any(z >= params.q):
        raise ValueError(f"residue out of range for Z_{params.q}")
    v = np.minimum((z - params.a) % params.q // params.b, params.c - 1)
    return int(v) if v.ndim == 0 else v


def lrf_eval(x: ZqVector, key: LrfKey, params: LrfParams) -> int:
    """Block index of <x, k> mod q."""
    if len(x) != params.n or len(key.k) != params.n:
        raise zq.ShapeError("dimension mismatch with params")
    return block_index(zq.inner_product(x, key.k), params)


def block_sizes(params: LrfParams) -> list[int]:
    """Sizes of blocks 0..c-1; sums to q."""
    return [params.b] * (params.c - 1) + [params.b - params.d]
