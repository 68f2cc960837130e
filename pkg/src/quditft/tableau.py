"""Symbolic stabilizer simulation for qudits.

A tableau holds m mutually commuting, independent stabilizer rows plus k
logical (X, Z) pairs with m + k = n.  Rows are exact :class:`PauliOperator`
values, so Clifford conjugation and the measurement update are carried out
with exact phases.  All operations are pure: they return new tableaus.

Measuring an operator A works row by row: pick one generator M that fails to
commute with A, normalize it so M A = w A M, restore commutation of every
other row by multiplying in powers of M, draw the outcome, apply the
correction M^outcome (which leaves all remaining rows fixed and turns the
post-state into the +1 eigenstate of A), and replace M's row by A.  When A
commutes with everything the outcome is deterministic and read off by solving
for A over the stabilizer rows with Gaussian elimination mod d.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .pauli import Dimension, PauliOperator

# When True, every engine operation re-validates the tableau invariants.
debug_validation = False


class TableauError(ValueError):
    """A tableau violated its invariants (corrupted bookkeeping)."""


class EntangledQuditError(ValueError):
    """Discard was requested for a qudit still entangled with the rest."""


@dataclass(frozen=True)
class StabilizerTableau:
    dim: Dimension
    n: int
    rows: tuple[PauliOperator, ...]
    pairs: tuple[tuple[PauliOperator, PauliOperator], ...]

    @property
    def k(self) -> int:
        return len(self.pairs)

    def logical_ops(self) -> tuple[PauliOperator, ...]:
        """All logical operators, X then Z per pair, in pair order."""
        out: list[PauliOperator] = []
        for lx, lz in self.pairs:
            out.append(lx)
            out.append(lz)
        return tuple(out)

    def violations(self) -> list[str]:
        """Invariant check; empty list means the tableau is well formed."""
        out = []
        d = self.dim.d
        if len(self.rows) + len(self.pairs) != self.n:
            out.append(
                f"row/pair count {len(self.rows)}+{len(self.pairs)} != n={self.n}"
            )
        ops = list(self.rows) + list(self.logical_ops())
        for op in ops:
            if op.n != self.n or op.dim.d != d:
                out.append(f"operator {op} does not live on {self.n} qudits at d={d}")
                return out
        for i, a in enumerate(self.rows):
            for j in range(i + 1, len(self.rows)):
                if a.commutation_exponent(self.rows[j]) != 0:
                    out.append(f"stabilizer rows {i} and {j} do not commute")
        if self.rows:
            mat = np.array([r.vector() for r in self.rows], dtype=int)
            if rank_mod(mat, d) != len(self.rows):
                out.append("stabilizer rows are dependent over Z_d")
        for i, row in enumerate(self.rows):
            for j, (lx, lz) in enumerate(self.pairs):
                if row.commutation_exponent(lx) != 0:
                    out.append(f"row {i} fails to commute with logical X_{j}")
                if row.commutation_exponent(lz) != 0:
                    out.append(f"row {i} fails to commute with logical Z_{j}")
        for i, (xi, zi) in enumerate(self.pairs):
            for j, (xj, zj) in enumerate(self.pairs):
                want = (-1) % d if i == j else 0
                if xi.commutation_exponent(zj) != want:
                    out.append(f"logical X_{i}/Z_{j} commutation exponent wrong")
                if i < j and xi.commutation_exponent(xj) != 0:
                    out.append(f"logical X_{i}/X_{j} do not commute")
                if i < j and zi.commutation_exponent(zj) != 0:
                    out.append(f"logical Z_{i}/Z_{j} do not commute")
        return out

    def assert_valid(self):
        bad = self.violations()
        if bad:
            raise TableauError("; ".join(bad))

    def to_lines(self) -> list[str]:
        """Printer: stabilizer rows first, then X/Z lines per logical pair."""
        lines = [r.to_text() for r in self.rows]
        for lx, lz in self.pairs:
            lines.append(lx.to_text())
            lines.append(lz.to_text())
        return lines


def _maybe_validate(t: StabilizerTableau) -> StabilizerTableau:
    if debug_validation:
        t.assert_valid()
    return t


# ---------------------------------------------------------------------------
# linear algebra over Z_d (d prime)
# ---------------------------------------------------------------------------

def rank_mod(mat: np.ndarray, d: int) -> int:
    m = mat.copy() % d
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r, c] % d), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = (m[rank] * pow(int(m[rank, c]), -1, d)) % d
        for r in range(rows):
            if r != rank and m[r, c] % d:
                m[r] = (m[r] - m[r, c] * m[rank]) % d
        rank += 1
        if rank == rows:
            break
    return rank


def solve_combination(vectors: Sequence[Sequence[int]], target: Sequence[int],
                      d: int) -> list[int] | None:
    """Coefficients e with sum_i e_i * vectors[i] = target mod d, else None."""
    k = len(vectors)
    if k == 0:
        return [] if not any(v % d for v in target) else None
    a = np.array(vectors, dtype=int) % d
    track = np.eye(k, dtype=int)
    rank = 0
    pivots = []
    for c in range(a.shape[1]):
        piv = next((r for r in range(rank, k) if a[r, c] % d), None)
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        track[[rank, piv]] = track[[piv, rank]]
        inv = pow(int(a[rank, c]), -1, d)
        a[rank] = (a[rank] * inv) % d
        track[rank] = (track[rank] * inv) % d
        for r in range(k):
            if r != rank and a[r, c] % d:
                f = a[r, c]
                a[r] = (a[r] - f * a[rank]) % d
                track[r] = (track[r] - f * track[rank]) % d
        pivots.append((rank, c))
        rank += 1
    v = np.array(target, dtype=int) % d
    coeffs = np.zeros(k, dtype=int)
    for r, c in pivots:
        if v[c] % d:
            f = v[c]
            v = (v - f * a[r]) % d
            coeffs = (coeffs + f * track[r]) % d
    if any(v % d):
        return None
    return [int(x) for x in coeffs]


def _product_for_coeffs(ops: Sequence[PauliOperator], coeffs: Sequence[int],
                        dim: Dimension, n: int) -> PauliOperator:
    acc = PauliOperator.identity(dim, n)
    for op, e in zip(ops, coeffs):
        if e % dim.d:
            acc = acc.multiply(op.power(e))
    return acc


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

KIND_ALIASES = {
    "zero": "zero", "0": "zero",
    "plus": "plus", "x": "plus", "x-eigenstate": "plus", "+": "plus",
    "open": "open", "open-logical": "open",
}


def initial_tableau(n: int, dim: Dimension, kinds: str | Sequence[str] = "zero"
                    ) -> StabilizerTableau:
    """Fresh tableau: each qudit either |0> (row Z), |+> (row X) or an open
    logical slot contributing an (X, Z) pair."""
    if n < 1:
        raise ValueError("need at least one qudit")
    if isinstance(kinds, str):
        kinds = [kinds] * n
    if len(kinds) != n:
        raise ValueError(f"expected {n} per-qudit kinds, got {len(kinds)}")
    rows = []
    pairs = []
    for q, kind in enumerate(kinds):
        norm = KIND_ALIASES.get(kind)
        if norm is None:
            raise ValueError(f"unknown preparation kind {kind!r}")
        if norm == "zero":
            rows.append(PauliOperator.from_site(dim, n, q, z=1))
        elif norm == "plus":
            rows.append(PauliOperator.from_site(dim, n, q, x=1))
        else:
            pairs.append((
                PauliOperator.from_site(dim, n, q, x=1),
                PauliOperator.from_site(dim, n, q, z=1),
            ))
    return _maybe_validate(StabilizerTableau(dim, n, tuple(rows), tuple(pairs)))


def append_qudit(t: StabilizerTableau, kind: str) -> StabilizerTableau:
    """Adjoin a fresh qudit (index t.n) prepared in the given kind."""
    dim = t.dim
    n = t.n + 1

    def ext(op: PauliOperator) -> PauliOperator:
        return PauliOperator(dim, op.x_exps + (0,), op.z_exps + (0,), op.phase)

    rows = [ext(r) for r in t.rows]
    pairs = [(ext(a), ext(b)) for a, b in t.pairs]
    norm = KIND_ALIASES.get(kind)
    if norm == "zero":
        rows.append(PauliOperator.from_site(dim, n, n - 1, z=1))
    elif norm == "plus":
        rows.append(PauliOperator.from_site(dim, n, n - 1, x=1))
    elif norm == "open":
        pairs.append((
            PauliOperator.from_site(dim, n, n - 1, x=1),
            PauliOperator.from_site(dim, n, n - 1, z=1),
        ))
    else:
        raise ValueError(f"unknown preparation kind {kind!r}")
    return _maybe_validate(StabilizerTableau(dim, n, tuple(rows), tuple(pairs)))


def permute_qudits(t: StabilizerTableau, perm: Sequence[int]) -> StabilizerTableau:
    """Relabel qudits: new index i holds what was at perm[i]."""
    if sorted(perm) != list(range(t.n)):
        raise ValueError("perm must be a permutation of range(n)")

    def re(op: PauliOperator) -> PauliOperator:
        return PauliOperator(
            t.dim,
            tuple(op.x_exps[p] for p in perm),
            tuple(op.z_exps[p] for p in perm),
            op.phase,
        )

    return StabilizerTableau(
        t.dim, t.n,
        tuple(re(r) for r in t.rows),
        tuple((re(a), re(b)) for a, b in t.pairs),
    )


# ---------------------------------------------------------------------------
# Clifford maps and gate conjugation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CliffordMap:
    """A Clifford unitary described by the images of the generators X_i, Z_i.

    Images carry exact phases; applying the map to an arbitrary operator uses
    the homomorphism property on its normal-form factorization.
    """

    dim: Dimension
    n: int
    x_images: tuple[PauliOperator, ...]
    z_images: tuple[PauliOperator, ...]

    @classmethod
    def identity(cls, dim: Dimension, n: int) -> "CliffordMap":
        return cls(
            dim, n,
            tuple(PauliOperator.from_site(dim, n, q, x=1) for q in range(n)),
            tuple(PauliOperator.from_site(dim, n, q, z=1) for q in range(n)),
        )

    def apply(self, p: PauliOperator) -> PauliOperator:
        out_n = self.x_images[0].n if self.x_images else 0
        acc = PauliOperator.identity(self.dim, out_n)
        for img, e in zip(self.x_images, p.x_exps):
            if e:
                acc = acc.multiply(img.power(e))
        for img, e in zip(self.z_images, p.z_exps):
            if e:
                acc = acc.multiply(img.power(e))
        return acc.with_phase(acc.phase + p.phase)

    def then(self, outer: "CliffordMap") -> "CliffordMap":
        """The composite map 'apply self, then outer'."""
        return CliffordMap(
            self.dim, self.n,
            tuple(outer.apply(p) for p in self.x_images),
            tuple(outer.apply(p) for p in self.z_images),
        )

    def is_symplectic(self) -> bool:
        d = self.dim.d
        for i in range(self.n):
            for j in range(self.n):
                if self.x_images[i].commutation_exponent(self.x_images[j]) != 0:
                    return False
                if self.z_images[i].commutation_exponent(self.z_images[j]) != 0:
                    return False
                want = (-1) % d if i == j else 0
                if self.x_images[i].commutation_exponent(self.z_images[j]) != want:
                    return False
        return True


TABLEAU_GATES = ("SUM", "INVSUM", "FOURIER", "PHASEGATE", "SCALE", "X", "Z", "PHASE2")


def gate_clifford_map(kind: str, dim: Dimension, n: int, qudits: Sequence[int],
                      param: int | None = None) -> CliffordMap:
    """Exact generator images (with phases) for one named Clifford gate.

    The images on kets, for reference:
      FOURIER   |j> -> sum_s w^{js} |s> / sqrt(d)
      PHASEGATE |j> -> w^{j(j-1)/2} |j>
      SUM       |i>|j> -> |i>|i+j>
      SCALE(a)  |j> -> |aj>          (a invertible mod d)
      PHASE2    |a>|b> -> w^{ab} |a>|b>
      X, Z      the Pauli gates themselves (conjugation shifts phases only).
    """
    d = dim.d
    qudits = tuple(qudits)
    for q in qudits:
        if not 0 <= q < n:
            raise ValueError(f"qudit index {q} out of range for n={n}")
    if len(set(qudits)) != len(qudits):
        raise ValueError("gate qudit indices must be distinct")
    xi = [PauliOperator.from_site(dim, n, q, x=1) for q in range(n)]
    zi = [PauliOperator.from_site(dim, n, q, z=1) for q in range(n)]

    def site(q, x=0, z=0, phase=0):
        return PauliOperator.from_site(dim, n, q, x=x, z=z, phase=phase)

    if kind == "FOURIER":
        (q,) = qudits
        xi[q] = site(q, z=1)
        zi[q] = site(q, x=d - 1)
    elif kind == "PHASEGATE":
        (q,) = qudits
        xi[q] = site(q, x=1, z=1)
    elif kind == "SCALE":
        (q,) = qudits
        if param is None or param % d == 0:
            raise ValueError(f"scale factor must be invertible mod {d}")
        xi[q] = site(q, x=param % d)
        zi[q] = site(q, z=dim.inv(param))
    elif kind == "X":
        (q,) = qudits
        e = 1 if param is None else param
        zi[q] = site(q, z=1, phase=-e)
    elif kind == "Z":
        (q,) = qudits
        e = 1 if param is None else param
        xi[q] = site(q, x=1, phase=e)
    elif kind == "SUM":
        c, t = qudits
        xi[c] = xi[c].multiply(site(t, x=1))
        zi[t] = zi[t].multiply(site(c, z=d - 1))
    elif kind == "INVSUM":
        c, t = qudits
        xi[c] = xi[c].multiply(site(t, x=d - 1))
        zi[t] = zi[t].multiply(site(c, z=1))
    elif kind == "PHASE2":
        a, b = qudits
        xi[a] = xi[a].multiply(site(b, z=1))
        xi[b] = xi[b].multiply(site(a, z=1))
    else:
        raise ValueError(f"unsupported tableau gate {kind!r}")
    return CliffordMap(dim, n, tuple(xi), tuple(zi))


def conjugate_by_gate(t: StabilizerTableau, kind: str, qudits: Sequence[int],
                      param: int | None = None, repeat: int = 1) -> StabilizerTableau:
    cmap = gate_clifford_map(kind, t.dim, t.n, qudits, param)
    rows = list(t.rows)
    pairs = list(t.pairs)
    for _ in range(repeat):
        rows = [cmap.apply(r) for r in rows]
        pairs = [(cmap.apply(a), cmap.apply(b)) for a, b in pairs]
    return _maybe_validate(StabilizerTableau(t.dim, t.n, tuple(rows), tuple(pairs)))


def conjugate_by_map(t: StabilizerTableau, cmap: CliffordMap) -> StabilizerTableau:
    return _maybe_validate(StabilizerTableau(
        t.dim, t.n,
        tuple(cmap.apply(r) for r in t.rows),
        tuple((cmap.apply(a), cmap.apply(b)) for a, b in t.pairs),
    ))


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

class MeasureResult(NamedTuple):
    outcome: int
    tableau: StabilizerTableau
    correction: PauliOperator | None   # M^outcome actually applied, None if deterministic
    deterministic: bool


def measure_pauli(t: StabilizerTableau, a_op: PauliOperator,
                  rng: np.random.Generator | None = None,
                  post_select: int | None = None) -> MeasureResult:
    """Measure a_op, apply the outcome-normalizing correction, update the rows.

    The phase of a_op shifts the reported outcome; the post-measurement
    tableau always contains a_op itself (the corrected state is its +1
    eigenstate).  The outcome is uniform over Z_d whenever some generator or
    logical operator fails to commute with a_op, and deterministic otherwise.
    """
    d = t.dim.d
    if a_op.n != t.n or a_op.dim.d != d:
        raise ValueError("measured operator does not match the tableau")
    if post_select is not None and not 0 <= post_select < d:
        raise ValueError(f"post-selected outcome {post_select} outside Z_{d}")

    row_c = [r.commutation_exponent(a_op) for r in t.rows]
    pair_c = [
        (lx.commutation_exponent(a_op), lz.commutation_exponent(a_op))
        for lx, lz in t.pairs
    ]

    m_row = next((i for i, c in enumerate(row_c) if c), None)
    if m_row is None and all(cx == 0 and cz == 0 for cx, cz in pair_c):
        # Deterministic branch: a_op is a product of stabilizer rows.
        coeffs = solve_combination(
            [r.vector() for r in t.rows], a_op.vector(), d
        )
        if coeffs is None:
            raise TableauError(
                "operator commutes with the full tableau but is not generated "
                "by the stabilizer rows"
            )
        prod = _product_for_coeffs(t.rows, coeffs, t.dim, t.n)
        outcome = (a_op.phase - prod.phase) % d
        if post_select is not None and post_select != outcome:
            raise ValueError(
                f"post-selected outcome {post_select} contradicts the "
                f"deterministic outcome {outcome}"
            )
        return MeasureResult(outcome, t, None, True)

    if m_row is not None:
        m_op = t.rows[m_row].power(pow(row_c[m_row], -1, d))
    else:
        pair_idx = next(i for i, (cx, cz) in enumerate(pair_c) if cx or cz)
        cx, cz = pair_c[pair_idx]
        member = t.pairs[pair_idx][0] if cx else t.pairs[pair_idx][1]
        m_op = member.power(pow(cx if cx else cz, -1, d))

    def fix(op: PauliOperator) -> PauliOperator:
        c = op.commutation_exponent(a_op)
        if c == 0:
            return op
        return m_op.power(-c).multiply(op)

    new_rows = [fix(r) for i, r in enumerate(t.rows) if i != m_row]
    if m_row is not None:
        new_pairs = [(fix(a), fix(b)) for a, b in t.pairs]
    else:
        new_pairs = [
            (fix(a), fix(b)) for i, (a, b) in enumerate(t.pairs) if i != pair_idx
        ]

    if post_select is not None:
        outcome = post_select
    else:
        if rng is None:
            raise ValueError("random measurement outcome requires an rng")
        outcome = int(rng.integers(d))

    new_rows.append(a_op)
    result = StabilizerTableau(t.dim, t.n, tuple(new_rows), tuple(new_pairs))
    return MeasureResult(outcome, _maybe_validate(result), m_op.power(outcome), False)


# ---------------------------------------------------------------------------
# canonical form, discard, logical map extraction
# ---------------------------------------------------------------------------

def _rref_rows(rows: list[PauliOperator], dim: Dimension, n: int,
               col_order: Sequence[int]) -> tuple[list[PauliOperator], list[tuple[int, int]]]:
    """Reduced row echelon form of the rows' (x|z) vectors over Z_d.

    Row operations are performed on the operators themselves (power and
    multiply), so phases stay exact.  Returns (rows, pivots) with pivots as
    (row index, column) pairs in elimination order.
    """
    d = dim.d
    rows = list(rows)
    pivots: list[tuple[int, int]] = []
    rank = 0
    for col in col_order:
        piv = next(
            (r for r in range(rank, len(rows)) if rows[r].vector()[col] % d), None
        )
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        val = rows[rank].vector()[col]
        if val != 1:
            rows[rank] = rows[rank].power(pow(val, -1, d))
        for r in range(len(rows)):
            if r != rank:
                e = rows[r].vector()[col]
                if e % d:
                    rows[r] = rows[r].multiply(rows[rank].power(-e))
        pivots.append((rank, col))
        rank += 1
        if rank == len(rows):
            break
    for r in range(rank, len(rows)):
        if not rows[r].is_identity():
            raise TableauError("dependent stabilizer rows (corrupted tableau)")
    if rank != len(rows):
        raise TableauError("dependent stabilizer rows (corrupted tableau)")
    return rows, pivots


def _reduce_by_pivots(op: PauliOperator, rows: list[PauliOperator],
                      pivots: list[tuple[int, int]], d: int) -> PauliOperator:
    for r, col in pivots:
        e = op.vector()[col]
        if e % d:
            op = op.multiply(rows[r].power(-e))
    return op


def canonicalize(t: StabilizerTableau) -> StabilizerTableau:
    """Unique generating set: stabilizer rows in reduced echelon form on their
    (x|z) vectors, logical operators reduced modulo the stabilizer."""
    col_order = list(range(2 * t.n))
    rows, pivots = _rref_rows(list(t.rows), t.dim, t.n, col_order)
    pairs = tuple(
        (
            _reduce_by_pivots(a, rows, pivots, t.dim.d),
            _reduce_by_pivots(b, rows, pivots, t.dim.d),
        )
        for a, b in t.pairs
    )
    return _maybe_validate(StabilizerTableau(t.dim, t.n, tuple(rows), pairs))


def discard_qudit(t: StabilizerTableau, qudit: int) -> StabilizerTableau:
    """Remove a disentangled qudit together with its single pure stabilizer row.

    The rows are first brought to echelon form with the discarded qudit's
    columns leading so that its support concentrates in one row; logical
    operators are reduced modulo the stabilizer, which strips their support on
    the qudit whenever that is possible at all.
    """
    if not 0 <= qudit < t.n:
        raise ValueError(f"qudit index {qudit} out of range")
    n = t.n
    lead = [qudit, n + qudit]
    col_order = lead + [c for c in range(2 * n) if c not in lead]
    rows, pivots = _rref_rows(list(t.rows), t.dim, t.n, col_order)
    pairs = [
        (
            _reduce_by_pivots(a, rows, pivots, t.dim.d),
            _reduce_by_pivots(b, rows, pivots, t.dim.d),
        )
        for a, b in t.pairs
    ]

    def touches(op: PauliOperator) -> bool:
        return op.x_exps[qudit] != 0 or op.z_exps[qudit] != 0

    touching = [i for i, r in enumerate(rows) if touches(r)]
    if len(touching) != 1 or rows[touching[0]].support() != (qudit,):
        raise EntangledQuditError(
            f"qudit {qudit} is still entangled: no single stabilizer row "
            "confines it"
        )
    for a, b in pairs:
        if touches(a) or touches(b):
            raise EntangledQuditError(
                f"qudit {qudit} is still entangled with a logical operator"
            )
    del rows[touching[0]]

    def drop(op: PauliOperator) -> PauliOperator:
        xs = op.x_exps[:qudit] + op.x_exps[qudit + 1:]
        zs = op.z_exps[:qudit] + op.z_exps[qudit + 1:]
        return PauliOperator(t.dim, xs, zs, op.phase)

    return _maybe_validate(StabilizerTableau(
        t.dim, n - 1,
        tuple(drop(r) for r in rows),
        tuple((drop(a), drop(b)) for a, b in pairs),
    ))


def logical_map(after: StabilizerTableau,
                reference_pairs: Sequence[tuple[PauliOperator, PauliOperator]]
                ) -> CliffordMap:
    """Express after's logical operators over a reference logical frame.

    Each final logical operator is decomposed over the final stabilizer rows
    together with the reference logicals; the stabilizer part acts as identity
    on the encoded data, so what remains is the induced map on k abstract
    qudits, with its exact phase.
    """
    dim = after.dim
    d = dim.d
    k = len(reference_pairs)
    if after.k != k:
        raise ValueError("logical slot count mismatch")
    ref_ops: list[PauliOperator] = []
    for lx, lz in reference_pairs:
        ref_ops.extend([lx, lz])
    basis = list(after.rows) + ref_ops
    vectors = [op.vector() for op in basis]

    def image_of(op: PauliOperator) -> PauliOperator:
        coeffs = solve_combination(vectors, op.vector(), d)
        if coeffs is None:
            raise TableauError(
                "logical operator is not generated by the stabilizer and the "
                "reference frame"
            )
        m = len(after.rows)
        # Rebuild the concrete product in canonical order: stabilizer part,
        # then reference X's, then reference Z's.
        parts: list[PauliOperator] = []
        for i in range(m):
            if coeffs[i] % d:
                parts.append(basis[i].power(coeffs[i]))
        a_exps = [coeffs[m + 2 * j] % d for j in range(k)]
        b_exps = [coeffs[m + 2 * j + 1] % d for j in range(k)]
        for j in range(k):
            if a_exps[j]:
                parts.append(ref_ops[2 * j].power(a_exps[j]))
        for j in range(k):
            if b_exps[j]:
                parts.append(ref_ops[2 * j + 1].power(b_exps[j]))
        acc = PauliOperator.identity(dim, after.n)
        for p in parts:
            acc = acc.multiply(p)
        if acc.vector() != op.vector():
            raise TableauError("decomposition lost the exponent vector")
        return PauliOperator(
            dim, tuple(a_exps), tuple(b_exps), (op.phase - acc.phase) % d
        )

    cmap = CliffordMap(
        dim, k,
        tuple(image_of(lx) for lx, _ in after.pairs),
        tuple(image_of(lz) for _, lz in after.pairs),
    )
    if not cmap.is_symplectic():
        raise TableauError("extracted logical map is not symplectic")
    return cmap


def extract_clifford_map(before: StabilizerTableau,
                         after: StabilizerTableau) -> CliffordMap:
    """The induced map on the logical qudits between two aligned tableaus."""
    if before.dim.d != after.dim.d or before.n != after.n or before.k != after.k:
        raise ValueError("tableaus must agree on dimension, qudit count and k")
    return logical_map(after, before.pairs)
