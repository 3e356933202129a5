"""Reference implementations of six desk-scale encryption schemes.

Four are noisy-inner-product schemes over Z_q (bit-by-bit secret-key and
public-key variants, a matrix variant with multi-bit block encoding, and a
negacyclic-ring variant); two are toy bitstring schemes (keyed-map XOR and
a 4-round Feistel permutation). Decryption is always a deterministic, total
function of (key, ciphertext), so it can be wrapped as a quantum oracle.

The toy keyed map and permutation are NOT cryptographic; they exist to give
the harness honest round-trip behavior.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import zq
from .zq import ErrorDistribution, RingPoly, ZqVector


# ---------------------------------------------------------------------------
# bit-by-bit secret-key scheme: c = <a, k> + bit*floor(q/2) + e
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SkeParams:
    q: int
    n: int
    error: ErrorDistribution

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if self.error.q != self.q:
            raise ValueError("error distribution modulus mismatch")


@dataclass(frozen=True)
class SkeKey:
    k: ZqVector


def ske_params(q: int, n: int, eta: int | None = None) -> SkeParams:
    eta = zq.default_eta(q) if eta is None else eta
    return SkeParams(q, n, ErrorDistribution(q, eta))


def ske_keygen(params: SkeParams, rng: np.random.Generator) -> SkeKey:
    return SkeKey(zq.sample_uniform_vector(params.q, params.n, rng))


def ske_encrypt(params: SkeParams, key: SkeKey, bit: int, rng: np.random.Generator):
    """Ciphertext (a, c) with a uniform and c = <a,k> + bit*floor(q/2) + e."""
    if bit not in (0, 1):
        raise ValueError("plaintext must be a single bit")
    a = zq.sample_uniform_vector(params.q, params.n, rng)
    e = zq.sample_error(params.error, rng)
    c = (zq.inner_product(a, key.k) + bit * (params.q // 2) + e) % params.q
    return a, c


def ske_decrypt(params: SkeParams, key: SkeKey, a, c):
    """0 iff c - <a,k> is within distance floor(q/4) of 0 on the cycle.

    Accepts a single ciphertext (a: length-n, c: int) or a batch
    (a: (N, n) array, c: (N,) array).
    """
    q = params.q
    avec = a.entries if isinstance(a, ZqVector) else np.asarray(a, dtype=np.int64)
    diff = (np.asarray(c) - avec @ key.k.entries) % q
    bit = (np.minimum(diff, q - diff) > q // 4).astype(np.int64)
    return int(bit) if bit.ndim == 0 else bit


# ---------------------------------------------------------------------------
# public-key variant: pk rows are noisy inner products, encryption combines
# a random subset; decryption is identical to the secret-key scheme
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PkeParams:
    q: int
    n: int
    m: int
    error: ErrorDistribution

    def __post_init__(self):
        if self.m < self.n:
            raise ValueError("need at least as many samples as dimensions")
        if self.error.q != self.q:
            raise ValueError("error distribution modulus mismatch")


@dataclass(frozen=True)
class PkeKeyPair:
    sk: ZqVector
    A: np.ndarray
    t: np.ndarray  # A @ sk + e


def pke_params(q: int, n: int, m: int | None = None, eta: int = 1) -> PkeParams:
    # default m = 2 * n * ceil(log2 q); eta defaults low so that the
    # accumulated subset-sum noise (weight floor(m/2) times eta) stays
    # inside the rounding radius at desk scale
    if m is None:
        m = 2 * n * max(1, int(np.ceil(np.log2(q))))
    return PkeParams(q, n, m, ErrorDistribution(q, eta))


def pke_keygen(params: PkeParams, rng: np.random.Generator) -> PkeKeyPair:
    sk = zq.sample_uniform_vector(params.q, params.n, rng)
    A = rng.integers(0, params.q, size=(params.m, params.n), dtype=np.int64)
    e = params.error.sample_centered(rng, size=params.m)
    t = (A @ sk.entries + e) % params.q
    return PkeKeyPair(sk, A, t)


def pke_encrypt(params: PkeParams, pk: tuple[np.ndarray, np.ndarray], bit: int,
                rng: np.random.Generator):
    """Combine a random half-weight subset of the public rows; add the bit in
    the high half of Z_q."""
    if bit not in (0, 1):
        raise ValueError("plaintext must be a single bit")
    A, t = pk
    v = zq.sample_hamming_vector(params.m, rng)
    a = ZqVector((v @ A) % params.q, params.q)
    c = (int(v @ t) + bit * (params.q // 2)) % params.q
    return a, c


def pke_decrypt(params: PkeParams, keypair: PkeKeyPair, a, c):
    """Bit-identical to ske_decrypt with key sk."""
    return ske_decrypt(SkeParams(params.q, params.n, params.error),
                       SkeKey(keypair.sk), a, c)


# ---------------------------------------------------------------------------
# matrix scheme with B-bit block encoding, q = 2^D
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrodoParams:
    q: int
    n: int
    nbar: int
    mbar: int
    bits: int
    error: ErrorDistribution

    def __post_init__(self):
        if self.q < 2 or (self.q & (self.q - 1)) != 0:
            raise ValueError("modulus must be a power of two")
        if not 1 <= self.bits <= self.dbits:
            raise ValueError("encoding bits must lie in 1..log2(q)")
        if self.error.q != self.q:
            raise ValueError("error distribution modulus mismatch")

    @property
    def dbits(self) -> int:
        return self.q.bit_length() - 1

    @property
    def block(self) -> int:
        """Width q / 2^B of one plaintext bucket."""
        return self.q >> self.bits


@dataclass(frozen=True)
class FrodoKeyPair:
    S: np.ndarray  # n x nbar
    A: np.ndarray  # n x n
    B: np.ndarray  # A S + E


def frodo_params(q: int, n: int, nbar: int, mbar: int, bits: int, eta: int = 1) -> FrodoParams:
    return FrodoParams(q, n, nbar, mbar, bits, ErrorDistribution(q, eta))


def frodo_keygen(params: FrodoParams, rng: np.random.Generator) -> FrodoKeyPair:
    q, n, nbar = params.q, params.n, params.nbar
    A = rng.integers(0, q, size=(n, n), dtype=np.int64)
    S = params.error.sample_centered(rng, size=(n, nbar)) % q
    E = params.error.sample_centered(rng, size=(n, nbar)) % q
    return FrodoKeyPair(S, A, (A @ S + E) % q)


def frodo_encode(params: FrodoParams, plaintext: np.ndarray) -> np.ndarray:
    """Place B-bit values in the top bits of each entry: value * q/2^B."""
    p = np.asarray(plaintext, dtype=np.int64)
    if p.shape != (params.mbar, params.nbar):
        raise ValueError(f"plaintext must be {params.mbar}x{params.nbar}")
    if np.any(p < 0) or np.any(p >= 2**params.bits):
        raise ValueError(f"plaintext entries must be {params.bits}-bit values")
    return p * params.block


def frodo_encrypt(params: FrodoParams, pk: tuple[np.ndarray, np.ndarray], M: np.ndarray,
                  rng: np.random.Generator):
    """C1 = S'A + E', C2 = M + S'B + E'' for fresh noise S', E', E''."""
    q, n, nbar, mbar = params.q, params.n, params.nbar, params.mbar
    A, B = pk
    M = np.asarray(M, dtype=np.int64)
    if M.shape != (mbar, nbar):
        raise ValueError(f"message must be {mbar}x{nbar}")
    if np.any(M % params.block != 0):
        raise ValueError("message entries must be multiples of q/2^B (top-bit encoding)")
    Sp = params.error.sample_centered(rng, size=(mbar, n))
    Ep = params.error.sample_centered(rng, size=(mbar, n))
    Epp = params.error.sample_centered(rng, size=(mbar, nbar))
    C1 = (Sp @ A + Ep) % q
    C2 = (M + Sp @ B + Epp) % q
    return C1, C2


def frodo_decrypt(params: FrodoParams, sk: np.ndarray, C1: np.ndarray, C2: np.ndarray) -> np.ndarray:
    """Recover the B-bit value of each entry of C2 - C1 S.

    Each entry is mapped to the index of its bucket of width q/2^B,
    rounding to the nearest bucket center so symmetric noise up to half a
    bucket decodes correctly.
    """
    C1 = np.asarray(C1, dtype=np.int64)
    C2 = np.asarray(C2, dtype=np.int64)
    raw = (C2 - C1 @ sk) % params.q
    return ((raw + params.block // 2) % params.q) // params.block % (2**params.bits)


def frodo_decrypt_rows(params: FrodoParams, sk: np.ndarray, c1_rows: np.ndarray,
                       c2_rows: np.ndarray) -> np.ndarray:
    """Row-batched decryption: (N, n) x (N, nbar) -> (N, nbar) plaintext values."""
    return frodo_decrypt(params, sk, c1_rows, c2_rows)


# ---------------------------------------------------------------------------
# negacyclic-ring scheme: single bit in the constant coefficient
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingParams:
    q: int
    n: int
    error: ErrorDistribution

    def __post_init__(self):
        if self.n < 1 or (self.n & (self.n - 1)) != 0:
            raise ValueError("ring degree must be a power of two")
        if self.error.q != self.q:
            raise ValueError("error distribution modulus mismatch")


@dataclass(frozen=True)
class RingKeyPair:
    s: RingPoly
    a: RingPoly
    c: RingPoly  # a*s + e


def ring_params(q: int, n: int, eta: int = 1) -> RingParams:
    return RingParams(q, n, ErrorDistribution(q, eta))


def _chi_poly(params: RingParams, rng: np.random.Generator) -> RingPoly:
    coeffs = params.error.sample_centered(rng, size=params.n) % params.q
    return RingPoly(coeffs, params.n, params.q)


def ringlwe_keygen(params: RingParams, rng: np.random.Generator) -> RingKeyPair:
    a = RingPoly(rng.integers(0, params.q, size=params.n, dtype=np.int64),
                 params.n, params.q)
    e = _chi_poly(params, rng)
    s = _chi_poly(params, rng)
    c = RingPoly((zq.negacyclic_mul(a, s).coeffs + e.coeffs) % params.q,
                 params.n, params.q)
    return RingKeyPair(s, a, c)


def ringlwe_encrypt(params: RingParams, pk: tuple[RingPoly, RingPoly], bit: int,
                    rng: np.random.Generator):
    """u = a*r + e1, v = c*r + e2 + bit*floor(q/2)."""
    if bit not in (0, 1):
        raise ValueError("plaintext must be a single bit")
    a, c = pk
    r, e1, e2 = (_chi_poly(params, rng) for _ in range(3))
    u = RingPoly((zq.negacyclic_mul(a, r).coeffs + e1.coeffs) % params.q,
                 params.n, params.q)
    vc = (zq.negacyclic_mul(c, r).coeffs + e2.coeffs) % params.q
    vc[0] = (vc[0] + bit * (params.q // 2)) % params.q
    return u, RingPoly(vc, params.n, params.q)


def ringlwe_decrypt(params: RingParams, sk: RingPoly, u: RingPoly, v: RingPoly) -> int:
    """0 iff the constant coefficient of v - u*s is within floor(q/4) of 0."""
    t = int((v.coeffs[0] - zq.negacyclic_mul(u, sk).coeffs[0]) % params.q)
    return int(zq.centered_abs(t, params.q) > params.q // 4)


def ringlwe_decrypt_coeffs(params: RingParams, sk: RingPoly, U: np.ndarray,
                           V: np.ndarray) -> np.ndarray:
    """Batched decryption on coefficient arrays of shape (N, n)."""
    q = params.q
    M = zq.negacyclic_matrix(sk)
    t = (np.asarray(V, dtype=np.int64)[:, 0] - np.asarray(U, dtype=np.int64) @ M[:, 0]) % q
    return (np.minimum(t, q - t) > q // 4).astype(np.int64)


# ---------------------------------------------------------------------------
# toy bitstring schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrfParams:
    n: int  # key, randomness, and message are all n-bit strings

    def __post_init__(self):
        if not 1 <= self.n <= 64:
            raise ValueError("bit length must lie in 1..64")


def _keyed_map(key: int, label: bytes, x: int, nbits: int) -> int:
    """Deterministic keyed pseudorandom map onto nbits-bit values (toy)."""
    digest = hashlib.sha256(
        key.to_bytes(16, "big") + label + x.to_bytes(16, "big")
    ).digest()
    return int.from_bytes(digest[:8], "big") & ((1 << nbits) - 1)


def prf_keygen(params: PrfParams, rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**params.n, dtype=np.uint64))


def prf_encrypt(params: PrfParams, key: int, m: int, rng: np.random.Generator):
    r = int(rng.integers(0, 2**params.n, dtype=np.uint64))
    return r, _keyed_map(key, b"prf", r, params.n) ^ m


def prf_decrypt(params: PrfParams, key: int, ct: tuple[int, int]) -> int:
    r, c = ct
    return c ^ _keyed_map(key, b"prf", r, params.n)


@dataclass(frozen=True)
class PrpParams:
    n: int  # message and randomness halves; the permutation acts on 2n bits
    rounds: int = 4

    def __post_init__(self):
        if not 1 <= self.n <= 32:
            raise ValueError("bit length must lie in 1..32")


def prp_keygen(params: PrpParams, rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**params.n, dtype=np.uint64))


def prp_forward(params: PrpParams, key: int, x: int) -> int:
    """Balanced Feistel network on 2n bits; a bijection by construction."""
    n, mask = params.n, (1 << params.n) - 1
    left, right = (x >> n) & mask, x & mask
    for i in range(params.rounds):
        left, right = right, left ^ _keyed_map(key, b"feistel%d" % i, right, n)
    return (left << n) | right


def prp_inverse(params: PrpParams, key: int, y: int) -> int:
    n, mask = params.n, (1 << params.n) - 1
    left, right = (y >> n) & mask, y & mask
    for i in reversed(range(params.rounds)):
        left, right = right ^ _keyed_map(key, b"feistel%d" % i, left, n), left
    return (left << n) | right


def prp_encrypt(params: PrpParams, key: int, m: int, rng: np.random.Generator) -> int:
    r = int(rng.integers(0, 2**params.n, dtype=np.uint64))
    return prp_forward(params, key, (m << params.n) | r)


def prp_decrypt(params: PrpParams, key: int, ct: int) -> int:
    """First n bits of the inverse permutation (the randomness is dropped)."""
    return prp_inverse(params, key, ct) >> params.n


# ---------------------------------------------------------------------------
# canonical JSON forms for keys and ciphertexts (row-major arrays)
# ---------------------------------------------------------------------------


def _flat(arr) -> list[int]:
    return [int(v) for v in np.asarray(arr).reshape(-1)]


def key_to_json(scheme: str, params, key) -> str:
    if scheme == "ske":
        payload = {"scheme": "ske", "q": params.q, "n": params.n,
                   "k": _flat(key.k.entries)}
    elif scheme == "pke":
        payload = {"scheme": "pke", "q": params.q, "n": params.n, "m": params.m,
                   "sk": _flat(key.sk.entries), "A": _flat(key.A), "t": _flat(key.t)}
    elif scheme == "frodo":
        payload = {"scheme": "frodo", "q": params.q, "n": params.n,
                   "nbar": params.nbar, "mbar": params.mbar, "bits": params.bits,
                   "S": _flat(key.S), "A": _flat(key.A), "B": _flat(key.B)}
    elif scheme == "ringlwe":
        payload = {"scheme": "ringlwe", "q": params.q, "n": params.n,
                   "s": _flat(key.s.coeffs), "a": _flat(key.a.coeffs),
                   "c": _flat(key.c.coeffs)}
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return json.dumps(payload, sort_keys=True)


def key_from_json(text: str):
    obj = json.loads(text)
    scheme, q, n = obj["scheme"], obj["q"], obj["n"]
    if scheme == "ske":
        return SkeKey(ZqVector(obj["k"], q))
    if scheme == "pke":
        m = obj["m"]
        return PkeKeyPair(ZqVector(obj["sk"], q),
                          np.array(obj["A"], dtype=np.int64).reshape(m, n),
                          np.array(obj["t"], dtype=np.int64))
    if scheme == "frodo":
        nbar = obj["nbar"]
        return FrodoKeyPair(np.array(obj["S"], dtype=np.int64).reshape(n, nbar),
                            np.array(obj["A"], dtype=np.int64).reshape(n, n),
                            np.array(obj["B"], dtype=np.int64).reshape(n, nbar))
    if scheme == "ringlwe":
        return RingKeyPair(RingPoly(obj["s"], n, q), RingPoly(obj["a"], n, q),
                           RingPoly(obj["c"], n, q))
    raise ValueError(f"unknown scheme {obj['scheme']!r}")


def ciphertext_to_json(scheme: str, params, ct) -> str:
    if scheme in ("ske", "pke"):
        a, c = ct
        payload = {"scheme": scheme, "q": params.q, "n": params.n,
                   "a": _flat(a.entries if isinstance(a, ZqVector) else a), "c": int(c)}
    elif scheme == "frodo":
        C1, C2 = ct
        payload = {"scheme": "frodo", "q": params.q, "n": params.n,
                   "nbar": params.nbar, "mbar": params.mbar,
                   "C1": _flat(C1), "C2": _flat(C2)}
    elif scheme == "ringlwe":
        u, v = ct
        payload = {"scheme": "ringlwe", "q": params.q, "n": params.n,
                   "u": _flat(u.coeffs), "v": _flat(v.coeffs)}
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return json.dumps(payload, sort_keys=True)


def ciphertext_from_json(text: str):
    obj = json.loads(text)
    scheme, q, n = obj["scheme"], obj["q"], obj["n"]
    if scheme in ("ske", "pke"):
        return ZqVector(obj["a"], q), int(obj["c"])
    if scheme == "frodo":
        mbar, nbar = obj["mbar"], obj["nbar"]
        return (np.array(obj["C1"], dtype=np.int64).reshape(mbar, n),
                np.array(obj["C2"], dtype=np.int64).reshape(mbar, nbar))
    if scheme == "ringlwe":
        return RingPoly(obj["u"], n, q), RingPoly(obj["v"], n, q)
    raise ValueError(f"unknown scheme {obj['scheme']!r}")
