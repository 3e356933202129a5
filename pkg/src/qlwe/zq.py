"""Arithmetic over Z_q: residues, vectors, matrices, negacyclic polynomials,
and seeded noise sampling.

Residues are kept in canonical form {0, ..., q-1} everywhere; centered
representatives only appear transiently inside `centered_abs` and the
samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ShapeError(ValueError):
    """Operand lengths or moduli do not match."""


def mod_reduce(x: int, q: int) -> int:
    """Reduce a signed integer to its canonical residue in {0, ..., q-1}."""
    if q < 2:
        raise ValueError(f"modulus must be >= 2, got {q}")
    return int(x) % q


def centered_abs(x, q: int):
    """Distance of residue x from 0 on the cycle Z_q: min(x, q - x).

    Accepts scalars or integer arrays; inputs must already be canonical
    residues.
    """
    x = np.asarray(x)
    if np.any(x < 0) or np.any(x >= q):
        raise ValueError(f"value out of range for Z_{q}")
    out = np.minimum(x, q - x)
    return int(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ZqVector:
    """Fixed-length vector with entries in {0, ..., q-1}."""

    entries: np.ndarray
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"modulus must be >= 2, got {self.q}")
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 1:
            raise ShapeError("entries must be one-dimensional")
        if np.any(arr < 0) or np.any(arr >= self.q):
            raise ValueError(f"entries out of range for Z_{self.q}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ZqVector)
            and self.q == other.q
            and np.array_equal(self.entries, other.entries)
        )


@dataclass(frozen=True)
class ZqMatrix:
    """Matrix with entries reduced mod q."""

    entries: np.ndarray
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"modulus must be >= 2, got {self.q}")
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeError("entries must be two-dimensional")
        if np.any(arr < 0) or np.any(arr >= self.q):
            raise ValueError(f"entries out of range for Z_{self.q}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def inner_product(x: ZqVector, y: ZqVector) -> int:
    """Inner product modulo q of two equal-length vectors."""
    if x.q != y.q:
        raise ShapeError(f"modulus mismatch: {x.q} vs {y.q}")
    if len(x) != len(y):
        raise ShapeError(f"length mismatch: {len(x)} vs {len(y)}")
    return int(np.dot(x.entries, y.entries) % x.q)


@dataclass(frozen=True)
class RingPoly:
    """Element of Z_q[x]/(x^n + 1), coefficient of x^0 first, n a power of two."""

    coeffs: np.ndarray
    n: int
    q: int

    def __post_init__(self):
        if self.n < 1 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"degree bound must be a power of two, got {self.n}")
        if self.q < 2:
            raise ValueError(f"modulus must be >= 2, got {self.q}")
        arr = np.array(self.coeffs, dtype=np.int64)
        if arr.shape != (self.n,):
            raise ShapeError(f"expected {self.n} coefficients, got shape {arr.shape}")
        if np.any(arr < 0) or np.any(arr >= self.q):
            raise ValueError(f"coefficients out of range for Z_{self.q}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingPoly)
            and (self.n, self.q) == (other.n, other.q)
            and np.array_equal(self.coeffs, other.coeffs)
        )


def negacyclic_mul(p1: RingPoly, p2: RingPoly) -> RingPoly:
    """Schoolbook product in Z_q[x]/(x^n + 1).

    Coefficients above degree n-1 fold back with a sign flip since
    x^n = -1 in the quotient ring.
    """
    if (p1.n, p1.q) != (p2.n, p2.q):
        raise ShapeError("ring mismatch")
    n, q = p1.n, p1.q
    full = np.convolve(p1.coeffs, p2.coeffs)
    folded = full[:n].copy()
    folded[: n - 1] -= full[n:]
    return RingPoly(folded % q, n, q)


def negacyclic_matrix(p: RingPoly) -> np.ndarray:
    """Matrix M with (u * p) = u @ M mod q for coefficient row-vectors u.

    M[i, k] is the contribution of u_i to output coefficient k:
    p_{k-i} when k >= i, else -p_{n+k-i} from the x^n = -1 fold.
    """
    n, q = p.n, p.q
    i, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    sign = np.where(k >= i, 1, -1)
    return (sign * p.coeffs[(k - i) % n]) % q


@dataclass(frozen=True)
class ErrorDistribution:
    """Discrete symmetric noise over Z_q with support bound eta.

    bounded-uniform: uniform over centered values {-eta, ..., eta}.
    rounded-gaussian: round(N(0, (eta/2)^2)) resampled until |e| <= eta.
    """

    q: int
    eta: int
    kind: str = "bounded-uniform"

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"modulus must be >= 2, got {self.q}")
        if self.eta < 0:
            raise ValueError("noise magnitude must be nonnegative")
        if 2 * self.eta + 1 > self.q:
            raise ValueError(f"support 2*{self.eta}+1 exceeds Z_{self.q}")
        if self.kind not in ("bounded-uniform", "rounded-gaussian"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    def sample_centered(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Centered samples in [-eta, eta]; deterministic given the generator."""
        if self.eta == 0:
            return np.zeros(size if size is not None else (), dtype=np.int64)
        if self.kind == "bounded-uniform":
            return rng.integers(-self.eta, self.eta + 1, size=size, dtype=np.int64)
        sigma = self.eta / 2.0
        out = np.rint(rng.normal(0.0, sigma, size=size)).astype(np.int64)
        bad = np.abs(out) > self.eta
        while np.any(bad):
            out[bad] = np.rint(rng.normal(0.0, sigma, size=int(bad.sum()))).astype(np.int64)
            bad = np.abs(out) > self.eta
        return out

    def sample(self, rng: np.random.Generator, size=None):
        """Residues mod q whose centered value lies within the support."""
        out = self.sample_centered(rng, size=size) % self.q
        return int(out) if np.ndim(out) == 0 else out


def default_eta(q: int) -> int:
    """Noise magnitude used when a scheme does not pin one: max(1, q // 16)."""
    return max(1, q // 16)


def sample_error(dist: ErrorDistribution, rng: np.random.Generator) -> int:
    """Draw one residue from the noise distribution."""
    return int(dist.sample(rng))


def sample_uniform_vector(q: int, n: int, rng: np.random.Generator) -> ZqVector:
    """Uniform vector in Z_q^n."""
    return ZqVector(rng.integers(0, q, size=n, dtype=np.int64), q)


def sample_hamming_vector(m: int, rng: np.random.Generator) -> np.ndarray:
    """Binary vector of length m with weight exactly floor(m/2), uniform
    among such vectors."""
    if m < 1:
        raise ValueError(f"length must be >= 1, got {m}")
    v = np.zeros(m, dtype=np.int64)
    ones = rng.choice(m, size=m // 2, replace=False)
    v[ones] = 1
    return v


def has_unit_entry(k: ZqVector) -> bool:
    """True iff some entry is invertible mod q."""
    return any(math.gcd(int(e), k.q) == 1 for e in k.entries)


def totient(q: int) -> int:
    """Euler totient by trial factorization."""
    if q < 1:
        raise ValueError(f"expected positive integer, got {q}")
    result, rem, p = q, q, 2
    while p * p <= rem:
        if rem % p == 0:
            while rem % p == 0:
                rem //= p
            result -= result // p
        p += 1
    if rem > 1:
        result -= result // rem
    return result
