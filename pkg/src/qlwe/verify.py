"""Cross-module invariant suites behind the `verify` subcommand.

Each check returns a list of failure strings; an empty list means the
property held at every parameter point it swept.
"""

from __future__ import annotations

import time

import numpy as np

from . import attacks, lrf, qsim, schemes, zq

TOL = 1e-9


def check_partition() -> list[str]:
    """Every residue lands in exactly one block and sizes sum to q, for all
    q <= 32, all block sizes, all offsets."""
    failures = []
    for q in range(2, 33):
        z = np.arange(q)
        for b in range(1, q):
            for a in range(q):
                params = lrf.LrfParams(q, 1, a, b)
                v = lrf.block_index(z, params)
                sizes = np.bincount(v, minlength=params.c)
                expected = np.array(lrf.block_sizes(params))
                if not np.array_equal(sizes, expected):
                    failures.append(f"partition q={q} b={b} a={a}: sizes {sizes.tolist()}")
    return failures


def check_qft_unitarity(seed: int = 7) -> list[str]:
    """<Fu, Fv> = <u, v> on random state pairs for q in 2..16."""
    rng = np.random.default_rng(seed)
    failures = []
    for q in range(2, 17):
        layout = qsim.RegisterLayout((q,))
        for _ in range(5):
            u = _random_state(layout, rng)
            v = _random_state(layout, rng)
            before = np.vdot(u.amps, v.amps)
            after = np.vdot(qsim.qft_zq(u, 0).amps, qsim.qft_zq(v, 0).amps)
            if abs(before - after) > TOL:
                failures.append(f"qft unitarity q={q}: drift {abs(before - after):.2e}")
    return failures


def check_kickback(seed: int = 11, functions_per_point: int = 50) -> list[str]:
    """Additive oracle on (psi (x) phase eigenstate) equals the phase oracle
    on psi, amplitude for amplitude, for (q, c) in 2..9 squared."""
    rng = np.random.default_rng(seed)
    failures = []
    for q in range(2, 10):
        layout = qsim.RegisterLayout((q,))
        for c in range(2, 10):
            for _ in range(functions_per_point):
                f = rng.integers(0, c, size=q)
                psi = _random_state(layout, rng)
                lhs = qsim.apply_additive_oracle(
                    qsim.tensor(psi, qsim.phase_eigenstate(c)), f, target=1)
                rhs = qsim.tensor(qsim.apply_phase_oracle(psi, f, c),
                                  qsim.phase_eigenstate(c))
                err = np.abs(lhs.amps - rhs.amps).max()
                if err > TOL:
                    failures.append(f"kickback q={q} c={c}: max diff {err:.2e}")
    return failures


def check_closed_form_vs_brute_force(keys_per_point: int = 5, q_max: int = 12,
                                     seed: int = 3) -> list[str]:
    """The closed-form success probability matches direct enumeration of
    the measured amplitude over the full grid q <= q_max, all b, all a,
    n <= 2, with random unit-entry keys. Anti-drift anchor for the whole
    analysis."""
    rng = np.random.default_rng(seed)
    failures = []
    for q in range(2, q_max + 1):
        for b in range(1, q):
            expected = attacks.exact_success_probability(q, b)
            for n in (1, 2):
                for a in range(q):
                    params = lrf.LrfParams(q, n, a, b)
                    for _ in range(keys_per_point):
                        key = _random_unit_key(q, n, rng)
                        got = attacks.brute_force_success(q, n, params, key)
                        if abs(got - expected) > TOL:
                            failures.append(
                                f"closed-form vs brute force q={q} b={b} a={a} n={n} "
                                f"k={key.tolist()}: {got} vs {expected}")
    return failures


def check_scheme_roundtrips(seed: int = 5) -> list[str]:
    """Decrypt(Encrypt(m)) == m at the pinned desk-scale parameter sets."""
    rng = np.random.default_rng(seed)
    failures = []

    params = schemes.ske_params(257, 8, eta=16)
    for i in range(1000):
        key = schemes.ske_keygen(params, rng)
        bit = i % 2
        a, c = schemes.ske_encrypt(params, key, bit, rng)
        if schemes.ske_decrypt(params, key, a, c) != bit:
            failures.append(f"ske round-trip trial {i}")
            break

    pparams = schemes.pke_params(257, 8, m=64, eta=1)
    for i in range(1000):
        kp = schemes.pke_keygen(pparams, rng)
        bit = i % 2
        a, c = schemes.pke_encrypt(pparams, (kp.A, kp.t), bit, rng)
        if schemes.pke_decrypt(pparams, kp, a, c) != bit:
            failures.append(f"pke round-trip trial {i}")
            break

    fparams = schemes.frodo_params(2**15, 64, 4, 4, bits=2, eta=2)
    for i in range(100):
        kp = schemes.frodo_keygen(fparams, rng)
        plain = rng.integers(0, 4, size=(4, 4))
        ct = schemes.frodo_encrypt(fparams, (kp.A, kp.B),
                                   schemes.frodo_encode(fparams, plain), rng)
        if not np.array_equal(schemes.frodo_decrypt(fparams, kp.S, *ct), plain):
            failures.append(f"frodo round-trip trial {i}")
            break

    rparams = schemes.ring_params(257, 4, eta=2)
    for i in range(1000):
        kp = schemes.ringlwe_keygen(rparams, rng)
        bit = i % 2
        u, v = schemes.ringlwe_encrypt(rparams, (kp.a, kp.c), bit, rng)
        if schemes.ringlwe_decrypt(rparams, kp.s, u, v) != bit:
            failures.append(f"ringlwe round-trip trial {i}")
            break

    prf = schemes.PrfParams(16)
    for i in range(1000):
        key = schemes.prf_keygen(prf, rng)
        m = int(rng.integers(0, 2**16))
        if schemes.prf_decrypt(prf, key, schemes.prf_encrypt(prf, key, m, rng)) != m:
            failures.append(f"prf round-trip trial {i}")
            break

    prp = schemes.PrpParams(16)
    for i in range(1000):
        key = schemes.prp_keygen(prp, rng)
        m = int(rng.integers(0, 2**16))
        if schemes.prp_decrypt(prp, key, schemes.prp_encrypt(prp, key, m, rng)) != m:
            failures.append(f"prp round-trip trial {i}")
            break
        x = int(rng.integers(0, 2**32))
        if schemes.prp_inverse(prp, key, schemes.prp_forward(prp, key, x)) != x:
            failures.append(f"feistel inverse trial {i}")
            break

    return failures


CHECKS = (
    ("block partition exhaustive", check_partition),
    ("qft unitarity", check_qft_unitarity),
    ("phase kickback equivalence", check_kickback),
    ("closed form vs brute force", check_closed_form_vs_brute_force),
    ("scheme round-trips", check_scheme_roundtrips),
)


def run_all(out=print) -> int:
    """Run every suite, print one pass/fail line each; 0 iff all pass."""
    status = 0
    for name, check in CHECKS:
        start = time.perf_counter()
        failures = check()
        elapsed = time.perf_counter() - start
        if failures:
            status = 1
            out(f"FAIL  {name}  ({elapsed:.1f}s)")
            for line in failures[:10]:
                out(f"      {line}")
            if len(failures) > 10:
                out(f"      ... and {len(failures) - 10} more")
        else:
            out(f"PASS  {name}  ({elapsed:.1f}s)")
    return status


def _random_state(layout: qsim.RegisterLayout, rng: np.random.Generator) -> qsim.StateVector:
    amps = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    return qsim.StateVector(layout, amps / np.linalg.norm(amps))


def _random_unit_key(q: int, n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        k = rng.integers(0, q, size=n, dtype=np.int64)
        if any(np.gcd(int(v), q) == 1 for v in k):
            return k
