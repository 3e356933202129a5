"""Single-quantum-query key-recovery attacks, their analytic success
probabilities, and the classical query baselines.

The quantum attacks all share one circuit: put the query registers in
uniform superposition, append a phase eigenstate on the response register so
the oracle's additive output kicks back as a root-of-unity phase, discard
the response register, Fourier transform every query register, and measure.
When the rounded function's key has a unit entry, the measurement
concentrates on the key itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import lrf, qsim, zq
from .lrf import LrfParams
from .qsim import RegisterLayout, ResourceCapError


class BudgetExceededError(RuntimeError):
    """An oracle call was attempted beyond the allowed quota."""


@dataclass
class OracleBudget:
    """Quantum-query allowance; every oracle application charges one unit."""

    allowed: int
    consumed: int = 0

    def charge(self) -> None:
        if self.consumed >= self.allowed:
            raise BudgetExceededError(
                f"quantum oracle budget of {self.allowed} exhausted"
            )
        self.consumed += 1


@dataclass
class AttackResult:
    """Raw outcome of one attack run."""

    outcome: tuple
    candidate: np.ndarray | None
    budget: OracleBudget


# ---------------------------------------------------------------------------
# oracle tabulation helpers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _zq_grid(q: int, n: int) -> np.ndarray:
    """All of Z_q^n as an (q^n, n) int array, rows in row-major order."""
    cols = []
    for i in range(n):
        reps_inner = q ** (n - 1 - i)
        reps_outer = q**i
        cols.append(np.tile(np.repeat(np.arange(q, dtype=np.int64), reps_inner), reps_outer))
    grid = np.stack(cols, axis=1) if cols else np.zeros((1, 0), dtype=np.int64)
    grid.setflags(write=False)
    return grid


def tabulate_oracle(oracle, q: int, n: int) -> np.ndarray:
    """Evaluate a classical oracle over all of Z_q^n.

    Accepts a pre-tabulated array of shape (q,)*n, a batch callable taking
    an (N, n) array of inputs, or a per-tuple callable.
    """
    dims = (q,) * n
    if isinstance(oracle, np.ndarray):
        if oracle.shape != dims:
            raise ValueError(f"oracle table shape {oracle.shape} != {dims}")
        return oracle
    grid = _zq_grid(q, n)
    try:
        vals = np.asarray(oracle(grid))
        if vals.shape != (grid.shape[0],):
            raise TypeError
    except TypeError:
        vals = np.fromiter((oracle(tuple(row)) for row in grid), dtype=np.int64,
                           count=grid.shape[0])
    return vals.reshape(dims)


@lru_cache(maxsize=8)
def _bv_initial_state(q: int, n: int, c: int) -> qsim.StateVector:
    """Uniform superposition over Z_q^n with the phase eigenstate appended."""
    return qsim.tensor(
        qsim.uniform_superposition(RegisterLayout((q,) * n)),
        qsim.phase_eigenstate(c),
    )


@lru_cache(maxsize=4)
def _split_grid(q: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Z_q^{n+1} split into the leading-n columns (contiguous) and the last
    column; the shape every binary decryption adapter queries on."""
    grid = _zq_grid(q, n + 1)
    head = np.ascontiguousarray(grid[:, :n])
    tail = np.ascontiguousarray(grid[:, n])
    head.setflags(write=False)
    tail.setflags(write=False)
    return head, tail


@lru_cache(maxsize=2)
def _ring_attack_operands(q: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Reusable decryption-query operands over Z_q^{n+1}: every polynomial
    pair (u, v) with v constant, as coefficient arrays."""
    head, tail = _split_grid(q, n)
    V = np.zeros((len(tail), n), dtype=np.int64)
    V[:, 0] = tail
    V.setflags(write=False)
    return head, V


# ---------------------------------------------------------------------------
# the single-query circuit
# ---------------------------------------------------------------------------


def bv_lrf_attack(oracle, q: int, n: int, c: int, rng: np.random.Generator,
                  budget: OracleBudget | None = None) -> tuple[int, ...]:
    """One-query key recovery against an additive rounded-inner-product
    oracle |x>|z> -> |x>|z + f(x) mod c>.

    Prepares the uniform superposition with a phase eigenstate appended,
    makes the single oracle call, discards the response register, applies
    the Fourier transform on every query register, and measures.
    """
    budget = OracleBudget(1) if budget is None else budget
    state = _bv_initial_state(q, n, c)
    budget.charge()
    table = tabulate_oracle(oracle, q, n)
    state = qsim.apply_additive_oracle(state, table, target=n)
    state = qsim.discard_register(state, n)
    state = qsim.qft_all_registers(state)
    return qsim.measure(state, tuple(range(n)), rng)


# ---------------------------------------------------------------------------
# analytic success probabilities
# ---------------------------------------------------------------------------


def brute_force_success(q: int, n: int, params: LrfParams, key) -> float:
    """Success probability by direct enumeration of the measured amplitude:
    |q^-n * sum_x w_c^{-f(x)} w_q^{<x,k>}|^2.

    Independent oracle for every probability claim; no simulator state and
    no closed-form shortcuts. Requires q^n <= 10^6.
    """
    if q**n > 10**6:
        raise ResourceCapError(f"enumeration of {q}^{n} points is too large")
    k = np.asarray(key.k.entries if isinstance(key, lrf.LrfKey) else key, dtype=np.int64)
    if k.shape != (n,):
        raise ValueError(f"key must have length {n}")
    t = (_zq_grid(q, n) @ k) % q
    v = lrf.block_index(t, params)
    amp = np.exp(2j * np.pi * (t / q - v / params.c)).sum() / q**n
    return float(abs(amp) ** 2)


def exact_success_probability(q: int, b: int) -> float:
    """Closed-form success probability |(1/q) sum_v w_c^{-v} w_q^{vb} T_v|^2
    with T_v the length-b (final: length b-d) partial geometric sums of w_q.

    Valid for any key with a unit entry and any block offset, both of which
    drop out of the modulus. O(b + c) time.
    """
    if not 1 <= b <= q - 1:
        raise ValueError(f"block size must lie in 1..{q - 1}, got {b}")
    c = -(-q // b)
    d = c * b - q
    roots = np.exp(2j * np.pi * np.arange(b) / q)
    t_full = roots.sum()
    t_last = roots[: b - d].sum()
    v = np.arange(c)
    phases = np.exp(2j * np.pi * v * (b / q - 1.0 / c))
    total = (phases[:-1] * t_full).sum() + phases[-1] * t_last
    return float(abs(total / q) ** 2)


def binary_threshold_params(q: int, n: int) -> tuple[LrfParams, bool]:
    """Two-block partition realized by the decryption rule
    "accept iff centered_abs(t) <= floor(q/4)".

    The accept arc has 2*floor(q/4)+1 elements; whichever of the two arcs is
    larger becomes block 0 so that block sizes are (b, b-d) with b >= b-d.
    Returns (params, flipped): flipped means block index = 1 - decryption
    bit, which only contributes a global phase for a binary oracle.
    """
    r = q // 4
    accept = 2 * r + 1
    start = (q - r) % q
    if accept >= q - accept:
        return LrfParams(q, n, start, accept), False
    return LrfParams(q, n, (start + accept) % q, q - accept), True


def binary_threshold_success(q: int) -> float:
    """Key-recovery probability for any decryption-style binary threshold
    oracle whose key has a unit entry (dimension-independent)."""
    params, _ = binary_threshold_params(q, 1)
    return exact_success_probability(q, params.b)


# ---------------------------------------------------------------------------
# exact reduced sampling for instances too large to hold densely
# ---------------------------------------------------------------------------


def _reduced_outcome_sample(profile: np.ndarray, q: int, key: np.ndarray, c: int,
                            rng: np.random.Generator) -> tuple[int, ...]:
    """Sample the measurement outcome without materializing the state.

    When the key's last entry is a unit, the post-transform amplitude is
    supported on the q multiples w*key with amplitude
    (1/q) sum_t w_c^{-profile(t)} w_q^{tw}; substituting x_last out of the
    inner product makes this exact, not an approximation. Used only when
    the dense tensor would exceed the amplitude cap; the simulation harness
    knows the key it planted, the attack itself still only sees oracle
    values (profile(t) is the oracle evaluated along the last axis).
    """
    if math.gcd(int(key[-1]), q) != 1:
        raise ResourceCapError(
            "state exceeds the amplitude cap and the planted key has no unit "
            "final entry, so the exact reduced sampler does not apply"
        )
    g = np.exp(-2j * np.pi * np.asarray(profile) / c)
    amps = np.fft.ifft(g)  # (1/q) sum_t g(t) w_q^{tw}
    probs = np.abs(amps) ** 2
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    w = min(int(np.searchsorted(cdf, u, side="right")), q - 1)
    return tuple(int(v) for v in (w * key) % q)


def _binary_dec_attack(dec_line, dec_batch, q: int, n_in: int,
                       rng: np.random.Generator, budget: OracleBudget,
                       key_prime: np.ndarray | None) -> tuple[int, ...]:
    """Run the single-query circuit against a binary decryption oracle over
    Z_q^{n_in}, falling back to the exact reduced sampler when the dense
    state would not fit.

    dec_batch(X) evaluates the oracle on an (N, n_in) batch; dec_line(t)
    evaluates it along the last input axis with all other coordinates zero.
    """
    dense_amplitudes = q**n_in * 2
    if dense_amplitudes <= qsim.state_cap():
        return bv_lrf_attack(dec_batch, q, n_in, 2, rng, budget)
    if key_prime is None:
        raise ResourceCapError(
            f"{dense_amplitudes} amplitudes exceed the cap and no planted key "
            "was provided for the exact reduced sampler"
        )
    budget.charge()
    profile = np.asarray(dec_line(np.arange(q, dtype=np.int64)))
    return _reduced_outcome_sample(profile, q, np.asarray(key_prime), 2, rng)


# ---------------------------------------------------------------------------
# scheme attacks: one quantum decryption query
# ---------------------------------------------------------------------------


def attack_ske(dec, q: int, n: int, rng: np.random.Generator,
               budget: OracleBudget | None = None,
               key_hint: np.ndarray | None = None) -> AttackResult:
    """Recover the key of the bit-by-bit secret-key scheme from one quantum
    decryption query.

    dec(A, c) must evaluate decryption on batched ciphertexts. The oracle
    over Z_q^{n+1} rounds <x, (-k, 1)>; if the measured final coordinate is
    1 the first n coordinates are negated into a key candidate, otherwise
    the run counts as a recovery failure.
    """
    budget = OracleBudget(1) if budget is None else budget
    kp = None
    if key_hint is not None:
        kp = np.concatenate([(-np.asarray(key_hint, dtype=np.int64)) % q, [1]])

    def dec_domain(_grid):
        head, tail = _split_grid(q, n)
        return dec(head, tail)

    outcome = _binary_dec_attack(
        lambda ts: dec(np.zeros((len(ts), n), dtype=np.int64), ts),
        dec_domain,
        q, n + 1, rng, budget, kp,
    )
    candidate = None
    if outcome[-1] == 1:
        candidate = (-np.asarray(outcome[:n], dtype=np.int64)) % q
    return AttackResult(outcome, candidate, budget)


def attack_pke(dec, q: int, n: int, rng: np.random.Generator,
               budget: OracleBudget | None = None,
               key_hint: np.ndarray | None = None) -> AttackResult:
    """Identical mechanics to attack_ske: only the decryption procedure
    matters, and it is the same function of (ciphertext, secret vector)."""
    return attack_ske(dec, q, n, rng, budget, key_hint)


def attack_ringlwe(dec_coeffs, q: int, n: int, rng: np.random.Generator,
                   budget: OracleBudget | None = None,
                   key_hint: np.ndarray | None = None) -> AttackResult:
    """Recover the ring scheme's secret polynomial from one quantum
    decryption query restricted to constant-v ciphertexts.

    dec_coeffs(U, V) must evaluate decryption on batched coefficient
    arrays. Decrypting (u, v0) rounds v0 - (u*s)_0, a binary oracle over
    Z_q^{n+1} whose key is (-s_0, s_{n-1}, ..., s_1, 1); the measured tuple
    is un-permuted accordingly.
    """
    budget = OracleBudget(1) if budget is None else budget

    def dec_domain(_grid):
        U, V = _ring_attack_operands(q, n)
        return dec_coeffs(U, V)

    def dec_line(ts):
        V = np.zeros((len(ts), n), dtype=np.int64)
        V[:, 0] = ts
        return dec_coeffs(np.zeros((len(ts), n), dtype=np.int64), V)

    kp = None
    if key_hint is not None:
        s = np.asarray(key_hint, dtype=np.int64)
        kp = np.concatenate([[(-s[0]) % q], s[1:][::-1], [1]])
    outcome = _binary_dec_attack(dec_line, dec_domain, q, n + 1, rng, budget, kp)
    candidate = None
    if outcome[-1] == 1:
        candidate = np.empty(n, dtype=np.int64)
        candidate[0] = (-outcome[0]) % q
        for j in range(1, n):
            candidate[j] = outcome[n - j]
    return AttackResult(outcome, candidate, budget)


def attack_frodo(dec_rows, q: int, n: int, nbar: int, mbar: int, bits: int,
                 columns, rng: np.random.Generator,
                 budget: OracleBudget | None = None) -> dict[int, np.ndarray]:
    """Recover chosen secret-matrix columns from one quantum decryption
    query against the matrix scheme.

    dec_rows(C1_rows, C2_rows) must evaluate decryption row-wise. Querying
    with C2 = 0 makes response entry (i, j) the rounded product of C1's row
    i with secret column j (plaintext entering negatively); one decryption
    call therefore acts independently on every row. Row i carries the phase
    eigenstate on response register j_i and uniform-magnitude states
    elsewhere, so only column j_i kicks back a phase; the inverse transform
    then compensates the negated plaintext. One unit of budget covers all
    rows.
    """
    budget = OracleBudget(1) if budget is None else budget
    columns = list(columns)
    if len(columns) > mbar:
        raise ValueError(f"at most {mbar} columns per query, got {len(columns)}")
    if any(not 0 <= j < nbar for j in columns):
        raise ValueError(f"column index out of range 0..{nbar - 1}")
    cdim = 2**bits
    grid = _zq_grid(q, n)
    budget.charge()
    tables = dec_rows(grid, np.zeros((grid.shape[0], nbar), dtype=np.int64))

    recovered: dict[int, np.ndarray] = {}
    for j in columns:
        state = qsim.uniform_superposition(RegisterLayout((q,) * n))
        for jj in range(nbar):
            state = qsim.tensor(
                state,
                qsim.phase_eigenstate(cdim) if jj == j
                else qsim.uniform_superposition(RegisterLayout((cdim,))),
            )
        for jj in range(nbar):
            # response entry jj depends only on the row register; broadcast
            # over the other response registers to the oracle's full domain
            vals = tables[:, jj].reshape((q,) * n + (1,) * (nbar - 1))
            full = np.broadcast_to(vals, (q,) * n + (cdim,) * (nbar - 1))
            state = qsim.apply_additive_oracle(state, np.ascontiguousarray(full),
                                               target=n + jj)
        for _ in range(nbar):
            state = qsim.discard_register(state, n)
        state = qsim.qft_all_registers(state, inverse=True)
        outcome = qsim.measure(state, tuple(range(n)), rng)
        recovered[j] = np.asarray(outcome, dtype=np.int64)
    return recovered


# ---------------------------------------------------------------------------
# randomness-access encryption attacks
# ---------------------------------------------------------------------------


def _ra_oracle_table(key: np.ndarray, q: int, n: int, shifts: np.ndarray) -> np.ndarray:
    """Response table of the randomness-access encryption oracle over the
    (message, a-vector) registers: <a,k> + m*floor(q/2) + e(a)."""
    t = (_zq_grid(q, n) @ key) % q
    table = np.empty((2,) + (q,) * n, dtype=np.int64)
    table[0] = ((t + shifts) % q).reshape((q,) * n)
    table[1] = ((t + shifts + q // 2) % q).reshape((q,) * n)
    return table


def _run_ra_circuit(table: np.ndarray, q: int, n: int,
                    rng: np.random.Generator, budget: OracleBudget) -> tuple[int, ...]:
    """Query |0> (x) uniform over Z_q^n (x) phase eigenstate, transform the
    a-registers, measure them."""
    state = qsim.tensor(
        qsim.basis_state(RegisterLayout((2,)), (0,)),
        qsim.tensor(
            qsim.uniform_superposition(RegisterLayout((q,) * n)),
            qsim.phase_eigenstate(q),
        ),
    )
    budget.charge()
    state = qsim.apply_additive_oracle(state, table, target=n + 1)
    state = qsim.discard_register(state, n + 1)
    for reg in range(1, n + 1):
        state = qsim.qft_zq(state, reg)
    return qsim.measure(state, tuple(range(1, n + 1)), rng)


def attack_ra_shared_error(key: np.ndarray, q: int, n: int,
                           error: zq.ErrorDistribution, rng: np.random.Generator,
                           budget: OracleBudget | None = None) -> AttackResult:
    """One quantum encryption query in the model where a single sampled
    error shifts every branch: the shift relabels the phase eigenstate's
    basis, so the key phases survive intact and the measurement yields the
    key with probability 1.
    """
    budget = OracleBudget(1) if budget is None else budget
    e = zq.sample_error(error, rng)
    table = _ra_oracle_table(np.asarray(key, dtype=np.int64), q, n,
                             np.full(q**n, e, dtype=np.int64))
    outcome = _run_ra_circuit(table, q, n, rng, budget)
    return AttackResult(outcome, np.asarray(outcome, dtype=np.int64), budget)


def attack_ra_iid(key: np.ndarray, q: int, n: int, error: zq.ErrorDistribution,
                  rng: np.random.Generator,
                  budget: OracleBudget | None = None) -> AttackResult:
    """One quantum encryption query with an independent error on every
    branch, realized as a random shift table e: Z_q^n -> support(chi)
    sampled once per query."""
    budget = OracleBudget(1) if budget is None else budget
    if q**n * 2 * q > qsim.state_cap():
        raise ResourceCapError(
            f"per-branch error table with {q}^{n} entries exceeds the cap"
        )
    shifts = error.sample(rng, size=q**n)
    table = _ra_oracle_table(np.asarray(key, dtype=np.int64), q, n, shifts)
    outcome = _run_ra_circuit(table, q, n, rng, budget)
    return AttackResult(outcome, np.asarray(outcome, dtype=np.int64), budget)


def ra_iid_success_bound(q: int, eta: int) -> float:
    """Analytic lower bound totient(q) / (24 * eta * q) for the
    branchwise-error attack (eta >= 1)."""
    if eta < 1:
        raise ValueError("bound applies to eta >= 1")
    return zq.totient(q) / (24.0 * eta * q)


# ---------------------------------------------------------------------------
# classical baselines
# ---------------------------------------------------------------------------


class CountingOracle:
    """Wrap a callable, counting invocations."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, *args):
        self.calls += 1
        return self.fn(*args)


def _recover_coordinate(ask, q: int) -> int:
    """Locate k_i from threshold answers: ask(t) = 0 iff k_i lies within
    floor(q/4) of t on the cycle.

    Every query tests membership of k_i in an arc of 2*floor(q/4)+1
    residues; the candidate set is filtered exactly and each probe is
    placed to split it as evenly as possible, so the count stays within
    ceil(log2 q) + 2.
    """
    r = q // 4
    width = 2 * r + 1
    if ask(0) == 0:
        cands = (np.arange(q - r, q - r + width) % q).astype(np.int64)
    else:
        cands = (np.arange(r + 1, q - r)).astype(np.int64)
    while len(cands) > 1:
        t = np.arange(q)[:, None]
        member = ((cands[None, :] - (t - r)) % q) <= 2 * r
        inside = member.sum(axis=1)
        valid = (inside > 0) & (inside < len(cands))
        balance = np.abs(2 * inside - len(cands)).astype(np.float64)
        balance[~valid] = np.inf
        probe = int(np.argmin(balance))
        keep_inside = ask(probe) == 0
        cands = cands[member[probe] == keep_inside]
    return int(cands[0])


def classical_dec_keyrec(dec, q: int, n: int) -> tuple[np.ndarray, int]:
    """Exact key recovery from classical decryption queries alone.

    Queries ciphertexts (e_i, c) per coordinate and bisects the accept
    arc's boundary; returns (key, total queries), with the total at most
    n * (ceil(log2 q) + 2).
    """
    oracle = CountingOracle(dec)
    key = np.empty(n, dtype=np.int64)
    for i in range(n):
        basis = np.zeros(n, dtype=np.int64)
        basis[i] = 1
        key[i] = _recover_coordinate(lambda t: int(oracle(basis, t)), q)
    return key, oracle.calls


def classical_ra_keyrec(enc_ra, q: int, n: int) -> tuple[np.ndarray, int]:
    """Exact key recovery in n classical encryption queries with full
    randomness control: encrypt 0 with e = 0 and a = e_i, reading k_i off
    the response."""
    oracle = CountingOracle(enc_ra)
    key = np.empty(n, dtype=np.int64)
    for i in range(n):
        basis = np.zeros(n, dtype=np.int64)
        basis[i] = 1
        _, c = oracle(0, basis, 0)
        key[i] = c
    return key, oracle.calls
