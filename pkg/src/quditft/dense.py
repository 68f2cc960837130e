"""Brute-force state-vector backend: the ground truth the symbolic engine is
checked against.

States live in C^(d^n) with qudit 0 as the most significant base-d digit.
Gates are exact unitaries; Pauli measurement uses the projector

    P_a = (1/d) * sum_j w^{-ja} A^j

so probabilities and post-states come straight from the definitions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .pauli import Dimension, PauliOperator, clock_matrix, shift_matrix
from .tableau import CliffordMap, StabilizerTableau

STRUCT_TOL = 1e-10
PROB_TOL = 1e-9
STATE_TOL = 1e-8

_DEFAULT_AMPLITUDE_CAP = 2**21


def amplitude_cap() -> int:
    value = os.environ.get("QUDITFT_DENSE_CAP")
    return int(value) if value else _DEFAULT_AMPLITUDE_CAP


class NotCliffordError(ValueError):
    """A unitary failed to normalize the Pauli group under conjugation."""


@dataclass
class DenseState:
    dim: Dimension
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        size = self.dim.d**self.n
        if size > amplitude_cap():
            raise ValueError(
                f"{self.n} qudits at d={self.dim.d} exceed the amplitude cap "
                f"({size} > {amplitude_cap()}); set QUDITFT_DENSE_CAP to override"
            )
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(size)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.dim.d,) * self.n)

    def copy(self) -> "DenseState":
        return DenseState(self.dim, self.n, self.amplitudes.copy())

    def dump(self, digits: int = 12) -> list[list[float]]:
        """JSON-friendly [re, im] pairs."""
        return [
            [round(float(a.real), digits), round(float(a.imag), digits)]
            for a in self.amplitudes
        ]


def basis_state(dim: Dimension, digits: tuple[int, ...] | list[int]) -> DenseState:
    n = len(digits)
    idx = 0
    for v in digits:
        if not 0 <= v < dim.d:
            raise ValueError(f"digit {v} out of range for d={dim.d}")
        idx = idx * dim.d + v
    amps = np.zeros(dim.d**n, dtype=complex)
    amps[idx] = 1.0
    return DenseState(dim, n, amps)


def random_state(dim: Dimension, n: int, rng: np.random.Generator) -> DenseState:
    amps = rng.normal(size=dim.d**n) + 1j * rng.normal(size=dim.d**n)
    return DenseState(dim, n, amps / np.linalg.norm(amps))


def kron_states(a: DenseState, b: DenseState) -> DenseState:
    """a's qudits stay most significant; b's qudits are appended after them."""
    if a.dim.d != b.dim.d:
        raise ValueError("dimension mismatch")
    return DenseState(a.dim, a.n + b.n, np.kron(a.amplitudes, b.amplitudes))


# ---------------------------------------------------------------------------
# gates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateSpec:
    kind: str
    param: int | None = None


GATE_ARITY = {
    "FOURIER": 1, "PHASEGATE": 1, "SCALE": 1, "X": 1, "Z": 1,
    "SUM": 2, "INVSUM": 2, "PHASE2": 2,
    "TOFFOLI": 3, "M1": 3, "M2": 3, "M3": 3,
}


def gate_matrix(spec: GateSpec, dim: Dimension) -> np.ndarray:
    """Exact unitary for one named gate.

    The Fourier transform carries the 1/sqrt(d) normalization and sums its
    index over 0..d-1.
    """
    d = dim.d
    w = dim.omega
    kind = spec.kind
    if kind == "FOURIER":
        js = np.arange(d)
        return np.power(w, np.outer(js, js)) / np.sqrt(d)
    if kind == "PHASEGATE":
        return np.diag([dim.root(j * (j - 1) // 2) for j in range(d)])
    if kind == "SCALE":
        a = spec.param
        if a is None or a % d == 0:
            raise ValueError(f"scale factor must be invertible mod {d}")
        m = np.zeros((d, d), dtype=complex)
        for j in range(d):
            m[(a * j) % d, j] = 1.0
        return m
    if kind == "X":
        e = 1 if spec.param is None else spec.param
        return np.linalg.matrix_power(shift_matrix(d), e % d)
    if kind == "Z":
        e = 1 if spec.param is None else spec.param
        return np.linalg.matrix_power(clock_matrix(d), e % d)
    if kind == "SUM":
        m = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                m[i * d + (i + j) % d, i * d + j] = 1.0
        return m
    if kind == "INVSUM":
        m = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                m[i * d + (j - i) % d, i * d + j] = 1.0
        return m
    if kind == "PHASE2":
        return np.diag([dim.root(a * b) for a in range(d) for b in range(d)])
    if kind == "TOFFOLI":
        m = np.zeros((d**3, d**3), dtype=complex)
        for a in range(d):
            for b in range(d):
                for c in range(d):
                    src = (a * d + b) * d + c
                    dst = (a * d + b) * d + (c + a * b) % d
                    m[dst, src] = 1.0
        return m
    if kind == "M1":
        # (X x I x I) . SUM(2 -> 3)
        x1 = np.kron(np.kron(shift_matrix(d), np.eye(d)), np.eye(d))
        s23 = np.kron(np.eye(d), gate_matrix(GateSpec("SUM"), dim))
        return x1 @ s23
    if kind == "M2":
        x2 = np.kron(np.kron(np.eye(d), shift_matrix(d)), np.eye(d))
        # SUM with control qudit 1 and target qudit 3
        m = np.zeros((d**3, d**3), dtype=complex)
        for a in range(d):
            for b in range(d):
                for c in range(d):
                    src = (a * d + b) * d + c
                    dst = (a * d + b) * d + (c + a) % d
                    m[dst, src] = 1.0
        return x2 @ m
    if kind == "M3":
        # (I x I x Z) . PHASE2(1, 2)^-1 : diagonal w^{c - ab}
        return np.diag([
            dim.root(c - a * b)
            for a in range(d) for b in range(d) for c in range(d)
        ])
    raise ValueError(f"unknown gate kind {kind!r}")


def apply_unitary(state: DenseState, u: np.ndarray, qudits: tuple[int, ...]
                  ) -> DenseState:
    d = state.dim.d
    k = len(qudits)
    if len(set(qudits)) != k:
        raise ValueError("gate qudit indices must be distinct")
    for q in qudits:
        if not 0 <= q < state.n:
            raise ValueError(f"qudit index {q} out of range")
    psi = state.tensor()
    ut = u.reshape((d,) * (2 * k))
    out = np.tensordot(ut, psi, axes=(tuple(range(k, 2 * k)), qudits))
    out = np.moveaxis(out, tuple(range(k)), qudits)
    return DenseState(state.dim, state.n, out.reshape(-1))


def apply_gate(state: DenseState, spec: GateSpec, qudits: tuple[int, ...]
               ) -> DenseState:
    if GATE_ARITY[spec.kind] != len(qudits):
        raise ValueError(f"{spec.kind} expects {GATE_ARITY[spec.kind]} qudits")
    return apply_unitary(state, gate_matrix(spec, state.dim), qudits)


def apply_pauli(state: DenseState, p: PauliOperator) -> DenseState:
    """Apply w^a X^x Z^z without building the full matrix: phases from the
    current digits, then cyclic shifts."""
    if p.n != state.n or p.dim.d != state.dim.d:
        raise ValueError("operator does not match the state")
    d = state.dim.d
    psi = state.tensor().copy()
    for q, z in enumerate(p.z_exps):
        if z:
            shape = [1] * state.n
            shape[q] = d
            vec = np.array([state.dim.root(z * j) for j in range(d)]).reshape(shape)
            psi = psi * vec
    for q, x in enumerate(p.x_exps):
        if x:
            psi = np.roll(psi, x, axis=q)
    if p.phase:
        psi = psi * state.dim.root(p.phase)
    return DenseState(state.dim, state.n, psi.reshape(-1))


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

def pauli_outcome_probabilities(state: DenseState, a_op: PauliOperator
                                ) -> tuple[np.ndarray, list[np.ndarray]]:
    """Probabilities and unnormalized projections P_a psi for a = 0..d-1."""
    d = state.dim.d
    powers = [state.amplitudes]
    current = state
    for _ in range(d - 1):
        current = apply_pauli(current, a_op)
        powers.append(current.amplitudes)
    projections = []
    for a in range(d):
        acc = np.zeros_like(state.amplitudes)
        for j in range(d):
            acc += state.dim.root(-j * a) * powers[j]
        projections.append(acc / d)
    probs = np.array([float(np.vdot(v, v).real) for v in projections])
    if abs(probs.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"projector probabilities sum to {probs.sum()}, not 1")
    return probs, projections


def measure_pauli_dense(state: DenseState, a_op: PauliOperator,
                        rng: np.random.Generator | None = None,
                        post_select: int | None = None
                        ) -> tuple[int, DenseState]:
    probs, projections = pauli_outcome_probabilities(state, a_op)
    if post_select is not None:
        if not 0 <= post_select < state.dim.d:
            raise ValueError("post-selected outcome outside Z_d")
        if probs[post_select] < 1e-12:
            raise ValueError(
                f"post-selected outcome {post_select} has zero probability"
            )
        outcome = post_select
    else:
        if rng is None:
            raise ValueError("sampling a measurement outcome requires an rng")
        outcome = int(rng.choice(state.dim.d, p=probs / probs.sum()))
    post = projections[outcome] / np.linalg.norm(projections[outcome])
    return outcome, DenseState(state.dim, state.n, post)


def measure_computational(state: DenseState, qudit: int,
                          rng: np.random.Generator | None = None,
                          post_select: int | None = None
                          ) -> tuple[int, DenseState]:
    """Projective measurement of one qudit in the computational basis."""
    d = state.dim.d
    psi = state.tensor()
    moved = np.moveaxis(psi, qudit, 0).reshape(d, -1)
    probs = (np.abs(moved) ** 2).sum(axis=1)
    if post_select is not None:
        if probs[post_select] < 1e-12:
            raise ValueError("post-selected digit has zero probability")
        outcome = post_select
    else:
        if rng is None:
            raise ValueError("sampling a measurement outcome requires an rng")
        outcome = int(rng.choice(d, p=probs / probs.sum()))
    collapsed = np.zeros_like(moved)
    collapsed[outcome] = moved[outcome]
    collapsed = collapsed.reshape((d,) + psi.shape[1:])
    collapsed = np.moveaxis(collapsed, 0, qudit)
    vec = collapsed.reshape(-1)
    return outcome, DenseState(state.dim, state.n, vec / np.linalg.norm(vec))


def diagonal_exponents(u: np.ndarray, dim: Dimension) -> np.ndarray:
    """Eigenvalue exponents k with u = diag(w^k); rejects anything else."""
    off = u - np.diag(np.diag(u))
    if np.abs(off).max() > STRUCT_TOL:
        raise ValueError("operator is not diagonal")
    diag = np.diag(u)
    if np.abs(np.abs(diag) - 1).max() > STRUCT_TOL:
        raise ValueError("diagonal entries are not unit modulus")
    angles = np.angle(diag) % (2 * np.pi)
    ks = np.rint(angles * dim.d / (2 * np.pi)).astype(int) % dim.d
    if np.abs(np.array([dim.root(int(k)) for k in ks]) - diag).max() > 1e-8:
        raise ValueError("eigenvalues are not d-th roots of unity")
    return ks


def measure_diagonal_unitary(state: DenseState, spec: GateSpec,
                             qudits: tuple[int, ...],
                             rng: np.random.Generator | None = None,
                             post_select: int | None = None
                             ) -> tuple[int, DenseState]:
    """Measure a diagonal Clifford with d-th-root-of-unity eigenvalues: project
    onto the w^outcome eigenspace and renormalize."""
    d = state.dim.d
    u = gate_matrix(spec, state.dim)
    ks = diagonal_exponents(u, state.dim)
    psi = state.tensor()
    k = len(qudits)
    moved = np.moveaxis(psi, qudits, tuple(range(k))).reshape(d**k, -1)
    probs = np.array([
        float((np.abs(moved[ks == a]) ** 2).sum()) for a in range(d)
    ])
    if abs(probs.sum() - 1.0) > PROB_TOL:
        raise ValueError("eigenspace probabilities do not sum to 1")
    if post_select is not None:
        if probs[post_select] < 1e-12:
            raise ValueError("post-selected eigenvalue has zero probability")
        outcome = post_select
    else:
        if rng is None:
            raise ValueError("sampling a measurement outcome requires an rng")
        outcome = int(rng.choice(d, p=probs / probs.sum()))
    masked = moved.copy()
    masked[ks != outcome] = 0.0
    masked = masked.reshape((d,) * k + psi.shape[k:])
    masked = np.moveaxis(masked, tuple(range(k)), qudits)
    vec = masked.reshape(-1)
    return outcome, DenseState(state.dim, state.n, vec / np.linalg.norm(vec))


# ---------------------------------------------------------------------------
# bridges between representations
# ---------------------------------------------------------------------------

def project_plus_one(state: DenseState, op: PauliOperator) -> DenseState:
    """Unnormalized projection onto the +1 eigenspace of op."""
    d = state.dim.d
    acc = state.amplitudes.copy()
    current = state
    for _ in range(d - 1):
        current = apply_pauli(current, op)
        acc += current.amplitudes
    return DenseState(state.dim, state.n, acc / d)


def tableau_to_state(t: StabilizerTableau) -> DenseState:
    """Dense realization of a pure (k = 0) tableau.

    Applies every generator's +1 projector to a reference basis vector,
    retrying other reference vectors if the projection vanishes.
    """
    if t.k != 0:
        raise ValueError("only pure tableaus (k = 0) have a dense realization")
    d = t.dim.d
    size = d**t.n
    for ref in range(size):
        amps = np.zeros(size, dtype=complex)
        amps[ref] = 1.0
        state = DenseState(t.dim, t.n, amps)
        ok = True
        for row in t.rows:
            state = project_plus_one(state, row)
            if state.norm() < 1e-9:
                ok = False
                break
        if not ok:
            continue
        state = DenseState(t.dim, t.n, state.amplitudes / state.norm())
        for row in t.rows:
            fixed = apply_pauli(state, row)
            if np.abs(fixed.amplitudes - state.amplitudes).max() > STRUCT_TOL:
                raise ValueError("projected state is not fixed by a generator")
        return state
    raise ValueError("all reference vectors were annihilated (corrupted tableau)")


def equal_up_to_global_phase(a: np.ndarray | DenseState, b: np.ndarray | DenseState,
                             tol: float = STATE_TOL) -> tuple[bool, complex]:
    """Phase-aligned comparison; returns (equal, aligning phase)."""
    av = a.amplitudes if isinstance(a, DenseState) else np.asarray(a)
    bv = b.amplitudes if isinstance(b, DenseState) else np.asarray(b)
    if av.shape != bv.shape:
        return False, 1.0 + 0j
    i = int(np.argmax(np.abs(av)))
    if abs(av[i]) < tol:
        return bool(np.abs(bv).max() < tol), 1.0 + 0j
    phase = bv[i] / av[i]
    mag = abs(phase)
    if abs(mag - 1.0) > tol:
        return False, phase
    phase = phase / mag
    return bool(np.abs(av * phase - bv).max() <= tol), phase


def fidelity(a: DenseState, b: DenseState) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def discard_qudit_dense(state: DenseState, qudit: int, tol: float = STATE_TOL
                        ) -> DenseState:
    """Drop a qudit that is in a product state with the rest (checked by SVD)."""
    d = state.dim.d
    psi = state.tensor()
    moved = np.moveaxis(psi, qudit, 0).reshape(d, -1)
    u, s, vh = np.linalg.svd(moved, full_matrices=False)
    if len(s) > 1 and s[1] > tol:
        raise EntangledDenseError(
            f"qudit {qudit} is still entangled (second singular value {s[1]:.2e})"
        )
    rest = vh[0] * s[0]
    return DenseState(state.dim, state.n - 1, rest / np.linalg.norm(rest))


class EntangledDenseError(ValueError):
    pass


def permute_qudits_dense(state: DenseState, perm: list[int]) -> DenseState:
    """Relabel qudits: new axis i holds what was axis perm[i]."""
    psi = state.tensor()
    out = np.moveaxis(psi, perm, tuple(range(state.n)))
    return DenseState(state.dim, state.n, out.reshape(-1))


def clifford_map_of_unitary(u: np.ndarray, dim: Dimension, n: int) -> CliffordMap:
    """Read off the Pauli permutation induced by conjugation with u.

    Each conjugated generator must be proportional to a Pauli; the shift part
    is read from the image of |0...0> and the clock part from phase ratios on
    single-digit basis vectors.
    """
    d = dim.d
    size = d**n
    if u.shape != (size, size):
        raise ValueError(f"expected a {size}x{size} matrix")
    if np.abs(u.conj().T @ u - np.eye(size)).max() > 1e-8:
        raise NotCliffordError("matrix is not unitary")

    def match(b: np.ndarray) -> PauliOperator:
        col = b[:, 0]
        hits = np.flatnonzero(np.abs(col) > 0.5)
        if len(hits) != 1:
            raise NotCliffordError("conjugate is not proportional to a Pauli")
        row = int(hits[0])
        xs = []
        r = row
        for _ in range(n):
            xs.append(r % d)
            r //= d
        xs = tuple(reversed(xs))
        val = col[row]
        angle = np.angle(val) % (2 * np.pi)
        phase = int(np.rint(angle * d / (2 * np.pi))) % d
        if abs(val - dim.root(phase)) > 1e-8:
            raise NotCliffordError("image phase is not a d-th root of unity")
        zs = []
        for q in range(n):
            idx = d ** (n - 1 - q)
            vec = b[:, idx]
            hit_row = np.flatnonzero(np.abs(vec) > 0.5)
            if len(hit_row) != 1:
                raise NotCliffordError("conjugate is not proportional to a Pauli")
            ratio = vec[int(hit_row[0])]
            angle = np.angle(ratio / dim.root(phase)) % (2 * np.pi)
            z = int(np.rint(angle * d / (2 * np.pi))) % d
            zs.append(z)
        cand = PauliOperator(dim, xs, tuple(zs), phase)
        if np.abs(cand.to_matrix() - b).max() > 1e-8:
            raise NotCliffordError("conjugate does not match any Pauli operator")
        return cand

    x_images = []
    z_images = []
    for q in range(n):
        for which, store in (("x", x_images), ("z", z_images)):
            p = PauliOperator.from_site(dim, n, q, x=1 if which == "x" else 0,
                                        z=1 if which == "z" else 0)
            b = u @ p.to_matrix() @ u.conj().T
            store.append(match(b))
    cmap = CliffordMap(dim, n, tuple(x_images), tuple(z_images))
    if not cmap.is_symplectic():
        raise NotCliffordError("induced map is not symplectic")
    return cmap


def unitary_of_clifford_map(cmap: CliffordMap) -> np.ndarray:
    """The unitary (unique up to global phase) inducing the given Pauli map.

    Anchors a joint +1 eigenvector v0 of the Z images, then builds columns as
    X-image products applied to v0.
    """
    dim = cmap.dim
    d = dim.d
    n = cmap.n
    size = d**n
    v0 = None
    for ref in range(size):
        amps = np.zeros(size, dtype=complex)
        amps[ref] = 1.0
        state = DenseState(dim, n, amps)
        ok = True
        for img in cmap.z_images:
            state = project_plus_one(state, img)
            if state.norm() < 1e-9:
                ok = False
                break
        if ok:
            v0 = state.amplitudes / state.norm()
            break
    if v0 is None:
        raise ValueError("no joint +1 eigenvector found (map not symplectic?)")
    u = np.zeros((size, size), dtype=complex)
    for idx in range(size):
        digits = []
        r = idx
        for _ in range(n):
            digits.append(r % d)
            r //= d
        digits.reverse()
        col = DenseState(dim, n, v0.copy())
        for q in range(n - 1, -1, -1):
            if digits[q]:
                col = apply_pauli(col, cmap.x_images[q].power(digits[q]))
        u[:, idx] = col.amplitudes
    if np.abs(u.conj().T @ u - np.eye(size)).max() > STRUCT_TOL * size:
        raise ValueError("synthesized matrix is not unitary")
    return u
