"""Global sections of rank-one sheaves on binary curves.

A section of a sheaf of multidegree (d1, d2) is a pair (f_1, f_2) of
polynomials of degree <= d_i in the affine coordinate of Z_i, stored as
one coefficient vector: block 1 holds the d1+1 coefficients of f_1 and
block 2 the d2+1 coefficients of f_2 (a block is empty when d_i < 0).
At every glued node j the section satisfies f_1(q1_j) = lambda_j f_2(q2_j);
nodes in J are left unglued.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence

from .curvemodel import BinaryCurve, MultiDegree, _check_node_subset
from .exactalg import Field, Subspace, kernel_rows, mat_mul_rows, rank_rows
from .ramification import DivisorStep, admissible_indices, as_step, divisor_sequence

__all__ = [
    "DivisorStep",
    "SheafRep",
    "SectionSpace",
    "LinearSeries",
    "line_bundle",
    "section_space",
    "h0",
    "vanishing_rows",
    "vanishing_subspace",
    "vanishing_dims",
    "multi_vanishing_sequence",
    "meets_ramification",
]


@dataclass(frozen=True)
class SheafRep:
    """Pushforward of a line bundle of multidegree ``dd`` on X_J.

    ``gluing`` lists ``(node, lambda)`` for every node outside J, sorted by
    node; the first lambda is 1.
    """

    J: frozenset
    dd: MultiDegree
    gluing: tuple

    @classmethod
    def normalized(cls, field: Field, J, dd: MultiDegree, gluing: Mapping[int, int]) -> "SheafRep":
        items = sorted((int(j), field(v)) for j, v in gluing.items())
        if any(v == 0 for _, v in items):
            raise ValueError("gluing values must be nonzero")
        if items:
            s = field.inv(items[0][1])
            items = [(j, field.reduce(v * s)) for j, v in items]
        return cls(frozenset(J), dd, tuple(items))

    @property
    def is_line_bundle(self) -> bool:
        return not self.J

    def lam(self, j: int):
        for node, v in self.gluing:
            if node == j:
                return v
        raise KeyError(j)

    def as_dict(self) -> dict:
        return dict(self.gluing)


def line_bundle(field: Field, dd: MultiDegree, lams: Sequence) -> SheafRep:
    """Line bundle with gluing ``lams[j]`` at node j (normalized on the way in)."""
    return SheafRep.normalized(field, (), dd, dict(enumerate(lams)))


def block_sizes(dd: MultiDegree) -> tuple[int, int]:
    return max(dd.d1 + 1, 0), max(dd.d2 + 1, 0)


def _powers(field: Field, t, n: int) -> list:
    out = []
    x = 1
    for _ in range(n):
        out.append(x)
        x = field.reduce(x * t)
    return out


def gluing_rows(X: BinaryCurve, I: SheafRep) -> list[list]:
    """One row per glued node: ev_{q1_j}(f_1) - lambda_j ev_{q2_j}(f_2)."""
    F = X.field
    _check_node_subset(X, I.J)
    n1, n2 = block_sizes(I.dd)
    lam = I.as_dict()
    rows = []
    for j, (t1, t2) in enumerate(X.nodes):
        if j in I.J:
            continue
        if j not in lam:
            raise ValueError(f"missing gluing value for node {j}")
        row = _powers(F, t1, n1) + [F.reduce(-lam[j] * x) for x in _powers(F, t2, n2)]
        rows.append(row)
    return rows


def shift_rows(field: Field, n: int, P, order: int) -> list[list]:
    """Functionals giving the coefficients of (t-P)^k, k < order, of a degree < n polynomial.

    Row k has entries C(i, k) P^(i-k).  Coefficient extraction after the
    substitution t = s + P, so the construction is valid in any characteristic.
    """
    rows = []
    pw = _powers(field, P, n)
    for k in range(min(order, n)):
        rows.append([field.reduce(comb(i, k) * pw[i - k]) if i >= k else 0 for i in range(n)])
    return rows


def vanishing_rows(X: BinaryCurve, dd: MultiDegree, D) -> list[list]:
    """Linear conditions for ord_{P_1} f_1 >= a1 and ord_{P_2} f_2 >= a2."""
    D = as_step(D)
    F = X.field
    n1, n2 = block_sizes(dd)
    rows = [r + [0] * n2 for r in shift_rows(F, n1, X.marked[0], D.a1)]
    rows += [[0] * n1 + r for r in shift_rows(F, n2, X.marked[1], D.a2)]
    return rows


@dataclass(frozen=True)
class SectionSpace:
    curve: BinaryCurve
    sheaf: SheafRep
    basis: Subspace

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def blocks(self) -> tuple[int, int]:
        return block_sizes(self.sheaf.dd)

    def split(self, v: Sequence) -> tuple[tuple, tuple]:
        n1, _ = self.blocks
        return tuple(v[:n1]), tuple(v[n1:])

    def table(self) -> str:
        """Exact coefficient table, one basis section per line."""
        lines = []
        for k, v in enumerate(self.basis.basis):
            f1, f2 = self.split(v)
            lines.append(f"s{k}: f1={list(f1)} f2={list(f2)}")
        return "\n".join(lines) if lines else "(no sections)"


def section_space(X: BinaryCurve, I: SheafRep) -> SectionSpace:
    n = sum(block_sizes(I.dd))
    rows = gluing_rows(X, I)
    basis = Subspace(X.field, n, tuple(tuple(r) for r in kernel_rows(X.field, rows, n)))
    return SectionSpace(X, I, basis)


def h0(X: BinaryCurve, I: SheafRep) -> int:
    return section_space(X, I).dim


@dataclass(frozen=True)
class LinearSeries:
    sheaf: SheafRep
    V: Subspace

    @property
    def r(self) -> int:
        return self.V.dim - 1

    @classmethod
    def checked(cls, S: SectionSpace, V: Subspace) -> "LinearSeries":
        if not V.issubspace(S.basis):
            raise ValueError("V is not contained in the section space")
        return cls(S.sheaf, V)


def vanishing_subspace(S: SectionSpace, D, V: Subspace | None = None) -> Subspace:
    """``V(-D)``: sections of V vanishing to order >= a_i at P_i."""
    V = S.basis if V is None else V
    conds = vanishing_rows(S.curve, S.sheaf.dd, D)
    if not conds or not V.basis:
        return V
    F = S.curve.field
    # Solve sum_k c_k (cond . v_k) = 0 for the coefficients c of V's basis.
    pairing = mat_mul_rows(F, conds, V.basis)
    coeffs = kernel_rows(F, pairing, V.dim)
    vecs = [[F.reduce(sum(c * v[i] for c, v in zip(cs, V.basis))) for i in range(V.ambient_dim)]
            for cs in coeffs]
    return Subspace.span(F, V.ambient_dim, vecs)


def vanishing_dims(S: SectionSpace, D_seq, V: Subspace | None = None) -> list[int]:
    """``dim V(-D_l)`` for each step of the (validated) sequence."""
    V = S.basis if V is None else V
    D = divisor_sequence(D_seq)
    F = S.curve.field
    if not V.basis:
        return [0] * len(D)
    top = D[-1]
    n1, n2 = S.blocks
    P1, P2 = S.curve.marked
    r1 = mat_mul_rows(F, shift_rows(F, n1, P1, top.a1), [v[:n1] for v in V.basis])
    r2 = mat_mul_rows(F, shift_rows(F, n2, P2, top.a2), [v[n1:] for v in V.basis])
    return [V.dim - rank_rows(F, r1[: s.a1] + r2[: s.a2], V.dim) for s in D]


def multi_vanishing_sequence(S: SectionSpace, D_seq, V: Subspace | None = None) -> list[int]:
    """Jump degrees of the filtration V(-D_0) >= V(-D_1) >= ... .

    A degree deg D_l appears dim V(-D_l) - dim V(-D_{l+1}) times, and the
    last step contributes dim V(-D_last) copies of its degree.
    """
    D = divisor_sequence(D_seq)
    dims = vanishing_dims(S, D, V)
    return sequence_from_dims(D, dims)


def sequence_from_dims(D: Sequence[DivisorStep], dims: Sequence[int]) -> list[int]:
    out: list[int] = []
    for l, step in enumerate(D):
        m = dims[l] - (dims[l + 1] if l + 1 < len(D) else 0)
        out.extend([step.deg] * m)
    return out


def meets_ramification(S: SectionSpace, D_seq, a_seq: Sequence[int], V: Subspace | None = None) -> bool:
    """Whether V has multi-vanishing sequence at least a along D."""
    V = S.basis if V is None else V
    D = divisor_sequence(D_seq)
    ls = admissible_indices(a_seq, D)
    r = len(a_seq) - 1
    if V.dim != r + 1:
        raise ValueError(f"V has dimension {V.dim}, ramification sequence expects {r + 1}")
    dims = vanishing_dims(S, D, V)
    return all(dims[l] >= r + 1 - j for j, l in enumerate(ls))
