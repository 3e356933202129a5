"""Seeded Monte Carlo experiments over the attacks.

Every trial draws a fresh key and runs one attack. Per-trial generators are
derived from the master seed and the trial index through
SeedSequence((seed, index)), split into separate key-generation and attack
streams, so results are reproducible and independent of worker scheduling.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import attacks, lrf, schemes, zq
from .attacks import OracleBudget

ATTACK_NAMES = (
    "lrf", "ske", "pke", "frodo", "ringlwe",
    "ra-shared", "ra-iid", "classical-dec", "classical-ra",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: an attack at a parameter point, repeated over seeded
    trials."""

    attack: str
    q: int
    n: int
    trials: int
    seed: int
    b: int | None = None          # block size for the synthetic oracle attack
    bits: int = 2                 # encoding bits of the matrix scheme
    nbar: int = 2
    mbar: int = 2
    eta: int | None = None
    columns: tuple[int, ...] | None = None
    workers: int = 1

    def __post_init__(self):
        if self.attack not in ATTACK_NAMES:
            raise ValueError(f"unknown attack {self.attack!r}; options: {ATTACK_NAMES}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class TrialCounts:
    successes: int = 0
    attempts: int = 0
    quantum_queries: int = 0
    classical_queries: int = 0

    def add(self, other: "TrialCounts") -> None:
        self.successes += other.successes
        self.attempts += other.attempts
        self.quantum_queries += other.quantum_queries
        self.classical_queries += other.classical_queries


@dataclass
class ExperimentResult:
    spec: "ExperimentSpec"
    successes: int
    attempts: int
    rate: float
    wilson_lo: float
    wilson_hi: float
    analytic: float | None
    quantum_queries_per_trial: int
    classical_queries_max: int
    wall_time_s: float


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = successes / trials
    denom = 1 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def trial_generators(seed: int, index: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(keygen stream, attack stream) for one trial; counter-derived."""
    kg_ss, atk_ss = np.random.SeedSequence((seed, index)).spawn(2)
    return np.random.default_rng(kg_ss), np.random.default_rng(atk_ss)


def _eta(spec: ExperimentSpec) -> int:
    if spec.eta is not None:
        return spec.eta
    return zq.default_eta(spec.q) if spec.attack in ("ske", "ra-shared", "ra-iid") else 1


def _sample_unit_key(q: int, n: int, rng: np.random.Generator) -> zq.ZqVector:
    while True:
        k = zq.sample_uniform_vector(q, n, rng)
        if zq.has_unit_entry(k):
            return k


def _as_list(arr) -> list[int] | None:
    return None if arr is None else [int(v) for v in np.asarray(arr).reshape(-1)]


def _trial_lrf(spec, kg_rng, atk_rng):
    q, n = spec.q, spec.n
    b = spec.b if spec.b is not None else -(-q // 2)
    a = int(kg_rng.integers(0, q))
    params = lrf.LrfParams(q, n, a, b)
    key = _sample_unit_key(q, n, kg_rng)

    def oracle(X):
        return lrf.block_index((X @ key.entries) % q, params)

    budget = OracleBudget(1)
    outcome = attacks.bv_lrf_attack(oracle, q, n, params.c, atk_rng, budget)
    candidate = np.asarray(outcome, dtype=np.int64)
    ok = np.array_equal(candidate, key.entries)
    detail = {"candidate": _as_list(candidate), "ground_truth": _as_list(key.entries)}
    return TrialCounts(int(ok), 1, budget.consumed, 0), detail


def _trial_ske(spec, kg_rng, atk_rng):
    params = schemes.ske_params(spec.q, spec.n, _eta(spec))
    key = schemes.ske_keygen(params, kg_rng)
    budget = OracleBudget(1)
    res = attacks.attack_ske(
        lambda A, c: schemes.ske_decrypt(params, key, A, c),
        spec.q, spec.n, atk_rng, budget, key_hint=key.k.entries,
    )
    ok = res.candidate is not None and np.array_equal(res.candidate, key.k.entries)
    detail = {"candidate": _as_list(res.candidate),
              "ground_truth": _as_list(key.k.entries),
              "key_json": schemes.key_to_json("ske", params, key)}
    return TrialCounts(int(ok), 1, budget.consumed, 0), detail


def _trial_pke(spec, kg_rng, atk_rng):
    params = schemes.pke_params(spec.q, spec.n, eta=_eta(spec))
    kp = schemes.pke_keygen(params, kg_rng)
    budget = OracleBudget(1)
    res = attacks.attack_pke(
        lambda A, c: schemes.pke_decrypt(params, kp, A, c),
        spec.q, spec.n, atk_rng, budget, key_hint=kp.sk.entries,
    )
    ok = res.candidate is not None and np.array_equal(res.candidate, kp.sk.entries)
    detail = {"candidate": _as_list(res.candidate), "ground_truth": _as_list(kp.sk.entries)}
    return TrialCounts(int(ok), 1, budget.consumed, 0), detail


def _trial_frodo(spec, kg_rng, atk_rng):
    params = schemes.frodo_params(spec.q, spec.n, spec.nbar, spec.mbar,
                                  spec.bits, _eta(spec))
    kp = schemes.frodo_keygen(params, kg_rng)
    columns = spec.columns if spec.columns is not None else tuple(
        range(min(spec.mbar, spec.nbar)))
    budget = OracleBudget(1)
    recovered = attacks.attack_frodo(
        lambda C1, C2: schemes.frodo_decrypt_rows(params, kp.S, C1, C2),
        spec.q, spec.n, spec.nbar, spec.mbar, spec.bits, columns, atk_rng, budget,
    )
    counts = TrialCounts(0, 0, budget.consumed, 0)
    per_column = {}
    for j, cand in recovered.items():
        has_odd = bool(np.any(kp.S[:, j] % 2 == 1))
        ok = bool(np.array_equal(cand, kp.S[:, j]))
        per_column[j] = {"candidate": _as_list(cand),
                         "ground_truth": _as_list(kp.S[:, j]),
                         "odd_entry": has_odd, "success": ok}
        if has_odd:  # even columns sit outside the recovery guarantee
            counts.attempts += 1
            counts.successes += int(ok)
    detail = {"columns": per_column}
    return counts, detail


def _trial_ringlwe(spec, kg_rng, atk_rng):
    params = schemes.ring_params(spec.q, spec.n, _eta(spec))
    kp = schemes.ringlwe_keygen(params, kg_rng)
    budget = OracleBudget(1)
    res = attacks.attack_ringlwe(
        lambda U, V: schemes.ringlwe_decrypt_coeffs(params, kp.s, U, V),
        spec.q, spec.n, atk_rng, budget, key_hint=kp.s.coeffs,
    )
    ok = res.candidate is not None and np.array_equal(res.candidate, kp.s.coeffs)
    detail = {"candidate": _as_list(res.candidate), "ground_truth": _as_list(kp.s.coeffs)}
    return TrialCounts(int(ok), 1, budget.consumed, 0), detail


def _trial_ra(spec, kg_rng, atk_rng, shared: bool):
    key = zq.sample_uniform_vector(spec.q, spec.n, kg_rng)
    error = zq.ErrorDistribution(spec.q, _eta(spec))
    budget = OracleBudget(1)
    fn = attacks.attack_ra_shared_error if shared else attacks.attack_ra_iid
    res = fn(key.entries, spec.q, spec.n, error, atk_rng, budget)
    ok = np.array_equal(res.candidate, key.entries)
    detail = {"candidate": _as_list(res.candidate), "ground_truth": _as_list(key.entries)}
    if not shared:
        detail["bound"] = attacks.ra_iid_success_bound(spec.q, max(_eta(spec), 1))
    return TrialCounts(int(ok), 1, budget.consumed, 0), detail


def _trial_classical_dec(spec, kg_rng, atk_rng):
    params = schemes.ske_params(spec.q, spec.n, _eta(spec))
    key = schemes.ske_keygen(params, kg_rng)
    recovered, queries = attacks.classical_dec_keyrec(
        lambda a, c: schemes.ske_decrypt(params, key, a, c), spec.q, spec.n)
    ok = np.array_equal(recovered, key.k.entries)
    detail = {"candidate": _as_list(recovered), "ground_truth": _as_list(key.k.entries)}
    return TrialCounts(int(ok), 1, 0, queries), detail


def _trial_classical_ra(spec, kg_rng, atk_rng):
    q, n = spec.q, spec.n
    key = zq.sample_uniform_vector(q, n, kg_rng)

    def enc_ra(m, a, e):
        c = (int(np.dot(a, key.entries)) + m * (q // 2) + e) % q
        return a, c

    recovered, queries = attacks.classical_ra_keyrec(enc_ra, q, n)
    ok = np.array_equal(recovered, key.entries)
    detail = {"candidate": _as_list(recovered), "ground_truth": _as_list(key.entries)}
    return TrialCounts(int(ok), 1, 0, queries), detail


_TRIAL_FNS = {
    "lrf": _trial_lrf,
    "ske": _trial_ske,
    "pke": _trial_pke,
    "frodo": _trial_frodo,
    "ringlwe": _trial_ringlwe,
    "ra-shared": lambda s, kg, at: _trial_ra(s, kg, at, shared=True),
    "ra-iid": lambda s, kg, at: _trial_ra(s, kg, at, shared=False),
    "classical-dec": _trial_classical_dec,
    "classical-ra": _trial_classical_ra,
}


def run_trial(spec: ExperimentSpec, index: int) -> TrialCounts:
    kg_rng, atk_rng = trial_generators(spec.seed, index)
    counts, _ = _TRIAL_FNS[spec.attack](spec, kg_rng, atk_rng)
    return counts


def run_trial_detailed(spec: ExperimentSpec, index: int) -> tuple[TrialCounts, dict]:
    kg_rng, atk_rng = trial_generators(spec.seed, index)
    return _TRIAL_FNS[spec.attack](spec, kg_rng, atk_rng)


def _run_range(spec: ExperimentSpec, lo: int, hi: int) -> tuple[TrialCounts, int]:
    total = TrialCounts()
    max_classical = 0
    for idx in range(lo, hi):
        counts = run_trial(spec, idx)
        max_classical = max(max_classical, counts.classical_queries)
        total.add(counts)
    return total, max_classical


def analytic_probability(spec: ExperimentSpec) -> float | None:
    """Closed-form or deterministic success probability at this point, when
    one applies."""
    if spec.attack == "lrf":
        b = spec.b if spec.b is not None else -(-spec.q // 2)
        return attacks.exact_success_probability(spec.q, b)
    if spec.attack in ("ske", "pke", "ringlwe"):
        return attacks.binary_threshold_success(spec.q)
    if spec.attack == "frodo":
        return attacks.exact_success_probability(spec.q, spec.q >> spec.bits)
    if spec.attack in ("ra-shared", "classical-dec", "classical-ra"):
        return 1.0
    return None  # ra-iid: only a lower bound exists


def effective_block_size(spec: ExperimentSpec) -> int | None:
    """Block size of the rounded oracle the attack actually faces."""
    if spec.attack == "lrf":
        return spec.b if spec.b is not None else -(-spec.q // 2)
    if spec.attack in ("ske", "pke", "ringlwe", "classical-dec"):
        return attacks.binary_threshold_params(spec.q, 1)[0].b
    if spec.attack == "frodo":
        return spec.q >> spec.bits
    return None


def success_rate_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run the attack over seeded trials with fresh per-trial keys and
    report the empirical rate with its 95% Wilson interval."""
    start = time.perf_counter()
    if spec.workers == 1 or spec.trials < 4:
        total, max_classical = _run_range(spec, 0, spec.trials)
    else:
        bounds = np.linspace(0, spec.trials, spec.workers * 4 + 1, dtype=int)
        total, max_classical = TrialCounts(), 0
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            futures = [pool.submit(_run_range, spec, int(lo), int(hi))
                       for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
            for fut in futures:
                counts, mx = fut.result()
                total.add(counts)
                max_classical = max(max_classical, mx)
    lo, hi = wilson_interval(total.successes, max(total.attempts, 1))
    rate = total.successes / max(total.attempts, 1)
    return ExperimentResult(
        spec=spec,
        successes=total.successes,
        attempts=total.attempts,
        rate=rate,
        wilson_lo=lo,
        wilson_hi=hi,
        analytic=analytic_probability(spec),
        quantum_queries_per_trial=total.quantum_queries // spec.trials,
        classical_queries_max=max_classical,
        wall_time_s=time.perf_counter() - start,
    )
