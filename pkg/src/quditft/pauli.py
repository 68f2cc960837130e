"""Exact arithmetic for the generalized Pauli group on n qudits of odd prime dimension.

Every operator is kept in the normal form

    w^a * prod_i X_i^{x_i} Z_i^{z_i}

with X written to the left of Z on each qudit and all exponents reduced into
[0, d).  X is the cyclic shift |j> -> |j+1 mod d|, Z the clock diag(w^j), and
w = exp(2*pi*i/d).  The single reordering rule X Z = w^-1 Z X determines every
phase below; products, powers and commutation exponents are closed-form in the
exponent vectors, so all arithmetic is exact integer arithmetic mod d.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

# Matrix realizations are refused above this many entries per axis.
MATRIX_AXIS_CAP = 2**20

DEFAULT_MAX_PRIME = 31


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    for p in range(2, int(math.isqrt(m)) + 1):
        if m % p == 0:
            return False
    return True


@dataclass(frozen=True)
class Dimension:
    """Qudit dimension d together with the phase convention w = exp(2*pi*i/d).

    Only odd primes are accepted: for even d the X*Z product has order 2d and
    the phase group picks up extra factors of i, which this package does not
    model.
    """

    d: int
    max_d: int = field(default=DEFAULT_MAX_PRIME, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.d, int):
            raise TypeError(f"dimension must be an int, got {type(self.d).__name__}")
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError(f"dimension must be an odd prime >= 3, got {self.d}")
        if not is_prime(self.d):
            raise ValueError(f"dimension must be prime, got {self.d}")
        if self.d > self.max_d:
            raise ValueError(f"dimension {self.d} exceeds the configured cap {self.max_d}")

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.d)

    def root(self, k: int) -> complex:
        """w^k as a complex number."""
        return np.exp(2j * np.pi * (k % self.d) / self.d)

    def inv(self, a: int) -> int:
        """Multiplicative inverse of a mod d (d prime, a not 0 mod d)."""
        a = a % self.d
        if a == 0:
            raise ValueError(f"0 has no inverse mod {self.d}")
        return pow(a, -1, self.d)


def shift_matrix(d: int) -> np.ndarray:
    """Single-qudit X: permutation matrix sending |j> to |j+1 mod d>."""
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + 1) % d, j] = 1.0
    return m


def clock_matrix(d: int) -> np.ndarray:
    """Single-qudit Z: diag(1, w, w^2, ...)."""
    omega = np.exp(2j * np.pi / d)
    return np.diag([omega**j for j in range(d)])


@dataclass(frozen=True)
class PauliOperator:
    """A normal-form element w^phase * prod_i X_i^{x_exps[i]} Z_i^{z_exps[i]}."""

    dim: Dimension
    x_exps: tuple[int, ...]
    z_exps: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        d = self.dim.d
        if len(self.x_exps) != len(self.z_exps):
            raise ValueError("x and z exponent vectors must have equal length")
        object.__setattr__(self, "x_exps", tuple(int(e) % d for e in self.x_exps))
        object.__setattr__(self, "z_exps", tuple(int(e) % d for e in self.z_exps))
        object.__setattr__(self, "phase", int(self.phase) % d)

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, dim: Dimension, n: int) -> "PauliOperator":
        return cls(dim, (0,) * n, (0,) * n, 0)

    @classmethod
    def from_site(cls, dim: Dimension, n: int, qudit: int, x: int = 0, z: int = 0,
                  phase: int = 0) -> "PauliOperator":
        """Operator acting as X^x Z^z on one qudit and trivially elsewhere."""
        if not 0 <= qudit < n:
            raise ValueError(f"qudit index {qudit} out of range for n={n}")
        xs = [0] * n
        zs = [0] * n
        xs[qudit] = x
        zs[qudit] = z
        return cls(dim, tuple(xs), tuple(zs), phase)

    @property
    def n(self) -> int:
        return len(self.x_exps)

    def is_identity(self) -> bool:
        return self.phase == 0 and not any(self.x_exps) and not any(self.z_exps)

    def vector(self) -> tuple[int, ...]:
        """The (x|z) exponent row used by linear algebra over Z_d."""
        return self.x_exps + self.z_exps

    # -- group operations --------------------------------------------------

    def _check_compatible(self, other: "PauliOperator"):
        if self.dim.d != other.dim.d:
            raise ValueError(f"dimension mismatch: {self.dim.d} vs {other.dim.d}")
        if self.n != other.n:
            raise ValueError(f"qudit count mismatch: {self.n} vs {other.n}")

    def multiply(self, other: "PauliOperator") -> "PauliOperator":
        """Matrix product self * other, renormalized to normal form.

        Moving other's X block left through self's Z block contributes
        w^(sum_i z_i * x'_i).
        """
        self._check_compatible(other)
        d = self.dim.d
        cross = sum(zs * xo for zs, xo in zip(self.z_exps, other.x_exps))
        return PauliOperator(
            self.dim,
            tuple(a + b for a, b in zip(self.x_exps, other.x_exps)),
            tuple(a + b for a, b in zip(self.z_exps, other.z_exps)),
            (self.phase + other.phase + cross) % d,
        )

    def power(self, m: int) -> "PauliOperator":
        """self^m.  Every operator has order dividing d, so m acts mod d."""
        d = self.dim.d
        mm = m % d
        tri = mm * (mm - 1) // 2
        cross = sum(x * z for x, z in zip(self.x_exps, self.z_exps))
        return PauliOperator(
            self.dim,
            tuple(mm * x for x in self.x_exps),
            tuple(mm * z for z in self.z_exps),
            (mm * self.phase + tri * cross) % d,
        )

    def inverse(self) -> "PauliOperator":
        return self.power(self.dim.d - 1)

    def commutation_exponent(self, other: "PauliOperator") -> int:
        """The c with self * other = w^c * other * self.

        For self = X^r Z^s and other = X^t Z^u this is sum_i (s_i t_i - r_i u_i)
        mod d; it ignores both phases.
        """
        self._check_compatible(other)
        c = sum(
            s * t - r * u
            for r, s, t, u in zip(self.x_exps, self.z_exps, other.x_exps, other.z_exps)
        )
        return int(c) % self.dim.d

    def commutes_with(self, other: "PauliOperator") -> bool:
        return self.commutation_exponent(other) == 0

    def weight(self) -> int:
        """Number of qudits acted on nontrivially."""
        return sum(1 for x, z in zip(self.x_exps, self.z_exps) if x or z)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, (x, z) in enumerate(zip(self.x_exps, self.z_exps)) if x or z)

    def tensor(self, other: "PauliOperator") -> "PauliOperator":
        if self.dim.d != other.dim.d:
            raise ValueError(f"dimension mismatch: {self.dim.d} vs {other.dim.d}")
        return PauliOperator(
            self.dim,
            self.x_exps + other.x_exps,
            self.z_exps + other.z_exps,
            self.phase + other.phase,
        )

    def with_phase(self, phase: int) -> "PauliOperator":
        return PauliOperator(self.dim, self.x_exps, self.z_exps, phase)

    # -- realization -------------------------------------------------------

    def to_matrix(self) -> np.ndarray:
        """Dense matrix of the normal form; refuses oversized realizations."""
        d = self.dim.d
        if d**self.n > MATRIX_AXIS_CAP:
            raise ValueError(
                f"matrix realization of {self.n} qudits at d={d} exceeds the cap"
            )
        xm = shift_matrix(d)
        zm = clock_matrix(d)
        factors = []
        for x, z in zip(self.x_exps, self.z_exps):
            f = np.linalg.matrix_power(xm, x) @ np.linalg.matrix_power(zm, z)
            factors.append(f)
        if factors:
            mat = reduce(np.kron, factors)
        else:
            mat = np.eye(1, dtype=complex)
        return self.dim.root(self.phase) * mat

    # -- text form ---------------------------------------------------------

    def to_text(self) -> str:
        """Whitespace-separated per-qudit tokens, e.g. ``w2 XZ2 I X``."""
        parts = []
        if self.phase:
            parts.append(f"w{self.phase}")
        for x, z in zip(self.x_exps, self.z_exps):
            if x == 0 and z == 0:
                parts.append("I")
                continue
            tok = ""
            if x:
                tok += "X" if x == 1 else f"X{x}"
            if z:
                tok += "Z" if z == 1 else f"Z{z}"
            parts.append(tok)
        return " ".join(parts)

    def __str__(self) -> str:
        return self.to_text()


_TOKEN_RE = re.compile(r"^(?:I|(?:X(?P<x>\d+)?)?(?:Z(?P<z>\d+)?)?)$")
_PHASE_RE = re.compile(r"^w(?P<c>\d+)$")


def parse_site_token(token: str, d: int) -> tuple[int, int]:
    """Parse one per-qudit token like ``X``, ``Z2`` or ``XZ2`` into (x, z)."""
    m = _TOKEN_RE.match(token)
    if not m or token == "":
        raise ValueError(f"bad Pauli token {token!r}")
    if token == "I":
        return 0, 0
    x = 0
    z = 0
    if "X" in token:
        x = int(m.group("x")) if m.group("x") is not None else 1
    if "Z" in token:
        z = int(m.group("z")) if m.group("z") is not None else 1
    for name, e in (("X", x), ("Z", z)):
        if e >= d:
            raise ValueError(f"{name} exponent {e} must be < d={d} in token {token!r}")
    return x, z


def parse_pauli(text: str, dim: Dimension, n: int | None = None) -> PauliOperator:
    """Parse the text form produced by :meth:`PauliOperator.to_text`."""
    tokens = text.split()
    phase = 0
    if tokens and tokens[0].startswith("w"):
        m = _PHASE_RE.match(tokens[0])
        if not m:
            raise ValueError(f"bad phase token {tokens[0]!r}")
        phase = int(m.group("c"))
        if phase >= dim.d:
            raise ValueError(f"phase exponent {phase} must be < d={dim.d}")
        tokens = tokens[1:]
    if not tokens:
        raise ValueError("empty Pauli string")
    sites = [parse_site_token(t, dim.d) for t in tokens]
    if n is not None and len(sites) != n:
        raise ValueError(f"expected {n} qudit tokens, got {len(sites)}")
    return PauliOperator(
        dim, tuple(x for x, _ in sites), tuple(z for _, z in sites), phase
    )
