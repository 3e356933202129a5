"""Exact state-vector simulation of registers over products of cyclic groups.

States are dense complex vectors indexed row-major by mixed-radix tuples
(register 0 most significant). All operations return new states; nothing
mutates a caller's buffer. Global phase is never normalized away.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

NORM_TOL = 1e-9
DEFAULT_STATE_CAP = 2**24
STATE_CAP_ENV = "QLWE_STATE_CAP"


class ResourceCapError(RuntimeError):
    """Requested state exceeds the amplitude cap."""


class EntangledRegisterError(RuntimeError):
    """discard_register called on a register that does not factor out."""


def state_cap() -> int:
    raw = os.environ.get(STATE_CAP_ENV)
    return int(raw) if raw else DEFAULT_STATE_CAP


@dataclass(frozen=True)
class RegisterLayout:
    """Per-register dimensions (q_1, ..., q_m)."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        mods = tuple(int(q) for q in self.moduli)
        if not mods or any(q < 2 for q in mods):
            raise ValueError(f"register dimensions must all be >= 2, got {mods}")
        object.__setattr__(self, "moduli", mods)

    @property
    def dim(self) -> int:
        out = 1
        for q in self.moduli:
            out *= q
        return out

    @property
    def num_registers(self) -> int:
        return len(self.moduli)

    def index_of(self, outcome: tuple[int, ...]) -> int:
        """Row-major dense index of a basis tuple."""
        return int(np.ravel_multi_index(outcome, self.moduli))

    def tuple_of(self, index: int) -> tuple[int, ...]:
        """Basis tuple of a dense index."""
        return tuple(int(v) for v in np.unravel_index(index, self.moduli))

    def dropped(self, register: int) -> "RegisterLayout":
        mods = self.moduli
        return RegisterLayout(mods[:register] + mods[register + 1 :])


class StateVector:
    """Normalized amplitudes over a register layout."""

    __slots__ = ("layout", "amps")

    def __init__(self, layout: RegisterLayout, amps: np.ndarray, *, _checked: bool = False):
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if layout.dim > state_cap():
            raise ResourceCapError(
                f"state of {layout.dim} amplitudes exceeds cap {state_cap()}"
                f" (override via {STATE_CAP_ENV})"
            )
        if amps.shape != (layout.dim,):
            raise ValueError(f"expected {layout.dim} amplitudes, got {amps.shape}")
        if not _checked:
            nrm = np.vdot(amps, amps).real
            if abs(nrm - 1.0) > NORM_TOL:
                raise ValueError(f"state not normalized: |amps|^2 = {nrm}")
        self.layout = layout
        self.amps = amps

    def grid(self) -> np.ndarray:
        """Amplitudes reshaped to the register dimensions (a view)."""
        return self.amps.reshape(self.layout.moduli)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


def uniform_superposition(layout: RegisterLayout) -> StateVector:
    """Every amplitude 1/sqrt(dim)."""
    d = layout.dim
    if d > state_cap():
        raise ResourceCapError(f"{d} amplitudes exceeds cap {state_cap()}")
    return StateVector(layout, np.full(d, 1.0 / np.sqrt(d), dtype=np.complex128), _checked=True)


def basis_state(layout: RegisterLayout, outcome: tuple[int, ...]) -> StateVector:
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[layout.index_of(outcome)] = 1.0
    return StateVector(layout, amps, _checked=True)


def phase_eigenstate(c: int) -> StateVector:
    """Single register in (1/sqrt(c)) sum_z w_c^z |z>, w_c = exp(2*pi*i/c)."""
    if c < 2:
        raise ValueError(f"dimension must be >= 2, got {c}")
    z = np.arange(c)
    amps = np.exp(2j * np.pi * z / c) / np.sqrt(c)
    return StateVector(RegisterLayout((c,)), amps, _checked=True)


def tensor(left: StateVector, right: StateVector) -> StateVector:
    layout = RegisterLayout(left.layout.moduli + right.layout.moduli)
    return StateVector(layout, np.kron(left.amps, right.amps), _checked=True)


def _oracle_values(f, dims: tuple[int, ...]) -> np.ndarray:
    """Tabulate f over the given register dimensions.

    f may be an ndarray already shaped like dims, or a callable taking one
    basis tuple.
    """
    if isinstance(f, np.ndarray):
        if f.shape != dims:
            raise ValueError(f"oracle table shape {f.shape} != register dims {dims}")
        return f.astype(np.int64, copy=False)
    vals = np.fromiter(
        (f(t) for t in np.ndindex(*dims)), dtype=np.int64, count=int(np.prod(dims))
    )
    return vals.reshape(dims)


def apply_additive_oracle(state: StateVector, f, target: int) -> StateVector:
    """Map |x>|z> to |x>|z + f(x) mod c> on the target register.

    x ranges over the non-target registers in layout order; a basis-state
    permutation, hence unitary.
    """
    mods = state.layout.moduli
    if not 0 <= target < len(mods):
        raise ValueError(f"no register {target} in layout {mods}")
    c = mods[target]
    in_dims = mods[:target] + mods[target + 1 :]
    vals = _oracle_values(f, in_dims).reshape(-1)
    if np.any(vals < 0) or np.any(vals >= c):
        raise ValueError(f"oracle values out of range for target dimension {c}")
    arr = np.moveaxis(state.grid(), target, -1).reshape(-1, c)
    if c == 2:
        # binary response register: shift by 1 is a column swap
        out = np.where((vals == 1)[:, None], arr[:, ::-1], arr)
    else:
        out = np.empty_like(arr)
        rows = np.arange(arr.shape[0])
        for z in range(c):
            out[:, z] = arr[rows, (z - vals) % c]
    out = np.moveaxis(out.reshape(in_dims + (c,)), -1, target)
    return StateVector(state.layout, out.reshape(-1), _checked=True)


def apply_phase_oracle(state: StateVector, f, c: int) -> StateVector:
    """Multiply the amplitude at each basis tuple x by w_c^{-f(x)}."""
    vals = _oracle_values(f, state.layout.moduli).reshape(-1)
    phases = np.exp(-2j * np.pi * (vals % c) / c)
    return StateVector(state.layout, state.amps * phases, _checked=True)


@lru_cache(maxsize=64)
def _qft_kernel(q: int, inverse: bool) -> np.ndarray:
    x = np.arange(q)
    sign = -1 if inverse else 1
    kernel = np.exp(sign * 2j * np.pi * np.outer(x, x) / q) / np.sqrt(q)
    kernel.setflags(write=False)
    return kernel


def _apply_kernel(state: StateVector, register: int, inverse: bool) -> StateVector:
    mods = state.layout.moduli
    if not 0 <= register < len(mods):
        raise ValueError(f"no register {register} in layout {mods}")
    q = mods[register]
    kernel = _qft_kernel(q, inverse)
    moved = np.moveaxis(state.grid(), register, 0).reshape(q, -1)
    out = kernel @ moved
    out = np.moveaxis(out.reshape((q,) + mods[:register] + mods[register + 1 :]), 0, register)
    return StateVector(state.layout, out.reshape(-1), _checked=True)


def qft_zq(state: StateVector, register: int) -> StateVector:
    """Dense q-dimensional Fourier transform, kernel w_q^{xy}/sqrt(q), on one
    register; the rest untouched."""
    return _apply_kernel(state, register, inverse=False)


def inverse_qft_zq(state: StateVector, register: int) -> StateVector:
    """Conjugate-transpose kernel w_q^{-xy}/sqrt(q)."""
    return _apply_kernel(state, register, inverse=True)


def qft_all_registers(state: StateVector, inverse: bool = False) -> StateVector:
    """Fourier transform every register.

    Equivalent to applying qft_zq to each register in turn; fused here as m
    rotating matrix products so the hot attack loop avoids per-axis
    transposition copies. Each pass contracts the current last axis and
    cycles it to the front, so after m passes the register order is
    restored.
    """
    mods = state.layout.moduli
    a = state.amps
    for q in reversed(mods):
        a = _qft_kernel(q, inverse) @ a.reshape(-1, q).T
    return StateVector(state.layout, a.reshape(-1), _checked=True)


def discard_register(state: StateVector, register: int) -> StateVector:
    """Drop an unentangled register, returning the remaining factor with unit
    norm.

    The state must factor as psi' (x) phi across the register within 1e-9;
    otherwise EntangledRegisterError is raised and the caller should use a
    phase-oracle formulation instead.
    """
    mods = state.layout.moduli
    if not 0 <= register < len(mods):
        raise ValueError(f"no register {register} in layout {mods}")
    c = mods[register]
    rows = np.moveaxis(state.grid(), register, -1).reshape(-1, c)
    pivot = int(np.argmax(np.einsum("ij,ij->i", rows.real, rows.real)
                          + np.einsum("ij,ij->i", rows.imag, rows.imag)))
    phi = rows[pivot]
    phi = phi / np.linalg.norm(phi)
    psi = rows @ phi.conj()
    residual_sq = state.norm_squared() - float(np.vdot(psi, psi).real)
    if residual_sq > NORM_TOL:
        raise EntangledRegisterError(
            f"register {register} is entangled (residual^2 = {residual_sq:.3e})"
        )
    psi = psi / np.linalg.norm(psi)
    return StateVector(state.layout.dropped(register), psi, _checked=True)


def outcome_probability(state: StateVector, registers: tuple[int, ...], outcome: tuple[int, ...]) -> float:
    """Probability of seeing `outcome` on the given registers: sum of
    |amplitude|^2 over the unmeasured ones."""
    mods = state.layout.moduli
    if len(registers) != len(outcome):
        raise ValueError("registers and outcome differ in length")
    indexer: list = [slice(None)] * len(mods)
    for r, o in zip(registers, outcome):
        if not 0 <= o < mods[r]:
            raise ValueError(f"outcome {o} out of range for register {r}")
        indexer[r] = o
    sub = state.grid()[tuple(indexer)]
    return float(np.sum(np.abs(sub) ** 2))


def measure(state: StateVector, registers: tuple[int, ...], rng: np.random.Generator) -> tuple[int, ...]:
    """Computational-basis measurement of the given registers.

    Samples via inverse CDF over the dense index and projects to the
    requested registers; deterministic given the generator state.
    """
    probs = np.abs(state.amps) ** 2
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    idx = int(np.searchsorted(cdf, u, side="right"))
    idx = min(idx, len(probs) - 1)
    full = state.layout.tuple_of(idx)
    return tuple(full[r] for r in registers)
