"""Exponent-allocation linear program for 3-regular pattern graphs.

For a pattern graph ``G``, an edge subset ``H`` and a vector ``lam`` in
``{0,1,2,3}^k`` the program is

    minimise   sum_i lam_i x_i
    subject to x >= 0,
               lam_i x_i + sum_{(i,j) in G \\ H} x_j >= 1   for every i with lam_i >= 1.

The row for ``lam_i = 0`` is waived: such a part is a single point and needs
no shrinking.  Everything here is exact rational arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .geometry import R3Point, format_rational, squared_distance_r3
from .graph import RegularGraphSpec


def _pq(value) -> str:
    return format_rational(value, always_ratio=True)


WAIVER_NOTE = "constraint rows with lambda_i = 0 are waived"

# allowed lambda values per H-degree, from the single-vertex rules
_LAMBDA_BY_DEGREE = {0: (1, 3), 1: (1, 2), 2: (1,), 3: (0, 1)}


@dataclass(frozen=True)
class TypePair:
    G: RegularGraphSpec
    H: frozenset[tuple[int, int]]
    lam: tuple[int, ...]

    def __post_init__(self) -> None:
        H = frozenset((min(a, b), max(a, b)) for a, b in self.H)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "lam", tuple(self.lam))
        if not H <= set(self.G.edges):
            raise ValueError("H must be a subset of E(G)")
        if len(self.lam) != self.G.k or any(l not in (0, 1, 2, 3) for l in self.lam):
            raise ValueError("lambda must be a vector in {0,1,2,3}^k")

    @classmethod
    def of(cls, G: RegularGraphSpec, H: Sequence[Sequence[int]], lam: Sequence[int]) -> "TypePair":
        return cls(G, frozenset(tuple(e) for e in H), tuple(lam))

    def h_degree(self, i: int) -> int:
        return sum(1 for e in self.H if i in e)

    def h_neighbors(self, i: int) -> list[int]:
        return [b if a == i else a for a, b in self.H if i in (a, b)]

    def free_neighbors(self, i: int) -> list[int]:
        """Neighbours of ``i`` along edges of ``G \\ H``."""
        return [j for j in self.G.neighbors(i) if (min(i, j), max(i, j)) not in self.H]

    def encoding(self) -> tuple:
        return (tuple(sorted(self.H)), self.lam)

    def as_dict(self) -> dict:
        return {"H": [list(e) for e in sorted(self.H)], "lambda": list(self.lam)}


@dataclass(frozen=True)
class Realizability:
    ok: bool
    violations: dict[str, list[int]]

    def __bool__(self) -> bool:
        return self.ok


def is_realizable(tp: TypePair) -> Realizability:
    """Check the five necessary conditions; ``violations`` names failing vertices.

    (i)   lam_i = 3 -> i isolated in H
    (ii)  lam_i = 2 -> exactly one H-neighbour, and it has lam = 0
    (iii) lam_i = 1 -> every H-neighbour has lam = 0
    (iv)  i isolated in H -> every G-neighbour has lam >= 1
    (v)   lam_i = 0 -> deg_H(i) = 3
    """
    lam = tp.lam
    bad: dict[str, list[int]] = {r: [] for r in ("i", "ii", "iii", "iv", "v")}
    for i in range(tp.G.k):
        deg = tp.h_degree(i)
        hn = tp.h_neighbors(i)
        if lam[i] == 3 and deg != 0:
            bad["i"].append(i)
        if lam[i] == 2 and (deg != 1 or lam[hn[0]] != 0):
            bad["ii"].append(i)
        if lam[i] == 1 and any(lam[j] != 0 for j in hn):
            bad["iii"].append(i)
        if deg == 0 and any(lam[j] < 1 for j in tp.G.neighbors(i)):
            bad["iv"].append(i)
        if lam[i] == 0 and deg != 3:
            bad["v"].append(i)
    violations = {r: v for r, v in bad.items() if v}
    return Realizability(not violations, violations)


# ---------------------------------------------------------------------------
# LP data


def constraint_rows(tp: TypePair) -> tuple[list[int], list[list[Fraction]]]:
    """Active constraint indices and their coefficient rows (waiver applied)."""
    k = tp.G.k
    active = [i for i in range(k) if tp.lam[i] >= 1]
    rows = []
    for i in active:
        row = [Fraction(0)] * k
        row[i] += tp.lam[i]
        for j in tp.free_neighbors(i):
            row[j] += 1
        rows.append(row)
    return active, rows


def _objective(tp: TypePair, x: Sequence[Fraction]) -> Fraction:
    return sum((Fraction(l) * xi for l, xi in zip(tp.lam, x)), Fraction(0))


def violated_rows(tp: TypePair, x: Sequence[Fraction]) -> list[int]:
    active, rows = constraint_rows(tp)
    bad = [i for i, row in zip(active, rows) if sum(a * b for a, b in zip(row, x)) < 1]
    bad += [j for j, xj in enumerate(x) if xj < 0]
    return sorted(set(bad))


def _simplex_max(A: list[list[Fraction]], b: list[Fraction], c: list[Fraction]):
    """Maximise ``c.y`` s.t. ``A y <= b``, ``y >= 0`` with ``b >= 0``.

    Dense tableau, Bland's rule.  Returns ``(value, y, duals)`` where
    ``duals`` are the optimal multipliers of the rows, or ``None`` when
    unbounded.
    """
    m, n = len(A), len(c)
    T = [list(A[r]) + [Fraction(int(r == s)) for s in range(m)] + [b[r]] for r in range(m)]
    obj = [-ci for ci in c] + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + r for r in range(m)]
    while True:
        enter = next((j for j in range(n + m) if obj[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for r in range(m):
            a = T[r][enter]
            if a > 0:
                ratio = T[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave, best = r, ratio
        if leave is None:
            return None
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        for r in range(m):
            if r != leave and T[r][enter] != 0:
                f = T[r][enter]
                T[r] = [v - f * w for v, w in zip(T[r], T[leave])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [v - f * w for v, w in zip(obj, T[leave])]
        basis[leave] = enter
    y = [Fraction(0)] * n
    for r, var in enumerate(basis):
        if var < n:
            y[var] = T[r][-1]
    return obj[-1], y, obj[n:n + m]


@dataclass(frozen=True)
class LPOutcome:
    xi: Fraction | None
    x_witness: tuple[Fraction, ...] | None
    feasible: bool
    dual_certificate: tuple[Fraction, ...] | None
    closed_form_x: tuple[Fraction, ...]
    closed_form_objective: Fraction
    closed_form_feasible: bool
    class_counts: tuple[int, ...]
    violated: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        fr = lambda v: [_pq(t) for t in v] if v is not None else None
        return {
            "xi": _pq(self.xi) if self.xi is not None else None,
            "x_witness": fr(self.x_witness),
            "feasible": self.feasible,
            "dual_certificate": fr(self.dual_certificate),
            "closed_form_x": fr(self.closed_form_x),
            "closed_form_objective": _pq(self.closed_form_objective),
            "closed_form_feasible": self.closed_form_feasible,
            "class_counts": list(self.class_counts),
        }


def solve_xi(tp: TypePair) -> LPOutcome:
    """Exact optimum of the program via its dual.

    The dual ``max sum y`` s.t. ``A^T y <= lam``, ``y >= 0`` starts from the
    slack basis.  Its final reduced costs give the primal ``x``; the result is
    checked by substitution and by ``sum lam x == sum y``.
    """
    k = tp.G.k
    active, rows = constraint_rows(tp)
    cf = closed_form_x(tp)
    cf_obj = _objective(tp, cf)
    counts = class_counts(tp).counts
    cf_ok = not violated_rows(tp, cf)
    if not active:
        zero = tuple(Fraction(0) for _ in range(k))
        return LPOutcome(Fraction(0), zero, True, (), cf, cf_obj, cf_ok, counts)
    At = [[rows[r][j] for r in range(len(active))] for j in range(k)]
    res = _simplex_max(At, [Fraction(l) for l in tp.lam], [Fraction(1)] * len(active))
    if res is None:
        # dual unbounded means the primal is infeasible
        return LPOutcome(None, None, False, None, cf, cf_obj, cf_ok, counts,
                         tuple(active))
    value, y, x = res
    x = tuple(x)
    if violated_rows(tp, x):
        raise AssertionError(f"primal recovery failed for {tp.as_dict()}")
    if _objective(tp, x) != value or sum(y) != value:
        raise AssertionError("duality gap in exact simplex")
    return LPOutcome(value, x, True, tuple(y), cf, cf_obj, cf_ok, counts)


def enumerate_vertices_xi(tp: TypePair) -> Fraction | None:
    """Oracle: minimum over all basic feasible solutions of the primal."""
    k = tp.G.k
    _, rows = constraint_rows(tp)
    eqs = rows + [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    rhs = [Fraction(1)] * len(rows) + [Fraction(0)] * k
    best = None
    for pick in combinations(range(len(eqs)), k):
        x = _solve_square([eqs[i] for i in pick], [rhs[i] for i in pick])
        if x is None or violated_rows(tp, x):
            continue
        val = _objective(tp, x)
        if best is None or val < best:
            best = val
    return best


def _solve_square(M: list[list[Fraction]], v: list[Fraction]) -> list[Fraction] | None:
    n = len(M)
    A = [list(row) + [v[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [t / p for t in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


def closed_form_x(tp: TypePair) -> tuple[Fraction, ...]:
    """``1/(2 lam)`` on H-isolated vertices, ``(1 - (3 - deg)/6)/lam``
    otherwise, and ``0`` where ``lam = 0``."""
    out = []
    for i, l in enumerate(tp.lam):
        deg = tp.h_degree(i)
        if l == 0:
            out.append(Fraction(0))
        elif deg == 0:
            out.append(Fraction(1, 2 * l))
        else:
            out.append((1 - Fraction(3 - deg, 6)) / l)
    return tuple(out)


@dataclass(frozen=True)
class ClassCounts:
    counts: tuple[int, ...]
    double_count_identity: bool
    size_identity: bool
    identity_expected: bool

    @property
    def printed_objective(self) -> Fraction:
        """The objective formula as printed alongside the counts."""
        k0, k1, k2, k3, k4, _ = self.counts
        return Fraction(k0, 2) + Fraction(k1, 3) + k2 + Fraction(2 * k3, 3) + Fraction(5 * k4, 6)

    @property
    def derived_objective(self) -> Fraction:
        """Sum of ``lam_i x_i`` recomputed per class (a ``deg_H = 1``,
        ``lam = 2`` vertex contributes ``2/3``)."""
        k0, k1, k2, k3, k4, _ = self.counts
        return Fraction(k0, 2) + Fraction(2 * k1, 3) + k2 + Fraction(2 * k3, 3) + Fraction(5 * k4, 6)


def class_counts(tp: TypePair) -> ClassCounts:
    """``(k0..k5)`` by H-degree and lambda, with both identities evaluated.

    ``identity_expected`` is true when every H-edge has a ``lam = 0``
    endpoint and none joins two ``lam = 0`` vertices; only then is the
    double-counting identity guaranteed.
    """
    c = [0] * 6
    for i, l in enumerate(tp.lam):
        deg = tp.h_degree(i)
        if deg == 0:
            c[0] += 1
        elif l == 0:
            c[5] += 1
        elif deg == 1 and l == 2:
            c[1] += 1
        elif deg == 3 and l == 1:
            c[2] += 1
        elif deg == 1 and l == 1:
            c[3] += 1
        elif deg == 2 and l == 1:
            c[4] += 1
    k0, k1, k2, k3, k4, k5 = c
    ident = 3 * k5 == k1 + 3 * k2 + k3 + 2 * k4
    size = Fraction(tp.G.k) == k0 + Fraction(4, 3) * k1 + 2 * k2 + Fraction(4, 3) * k3 + Fraction(5, 3) * k4
    zero_ends = [sum(1 for v in e if tp.lam[v] == 0) for e in tp.H]
    expected = all(z == 1 for z in zero_ends)
    return ClassCounts(tuple(c), ident, size, expected)


# ---------------------------------------------------------------------------
# sweep


def candidate_pairs(G: RegularGraphSpec):
    """All ``(H, lam)`` passing the per-vertex degree rules, then the rest."""
    edges = list(G.edges)
    for mask in range(1 << len(edges)):
        H = frozenset(e for b, e in enumerate(edges) if mask >> b & 1)
        deg = [0] * G.k
        for a, b in H:
            deg[a] += 1
            deg[b] += 1
        for lam in product(*(_LAMBDA_BY_DEGREE[d] for d in deg)):
            yield TypePair(G, H, lam)


@dataclass
class SweepReport:
    G: RegularGraphSpec
    max_xi: Fraction
    argmax: TypePair
    pairs_checked: int
    realizable_pairs: int
    counterexamples: list[TypePair] = field(default_factory=list)
    closed_form_infeasible: list[TypePair] = field(default_factory=list)
    closed_form_equalities: int = 0
    printed_formula_mismatches: list[TypePair] = field(default_factory=list)
    identity_findings: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.closed_form_infeasible

    def certificate(self) -> dict:
        return {
            "graph": {"k": self.G.k, "edges": [list(e) for e in self.G.edges]},
            "max_xi": _pq(self.max_xi),
            "half_k": _pq(Fraction(self.G.k, 2)),
            "argmax": self.argmax.as_dict(),
            "pairs_checked": self.pairs_checked,
            "realizable_pairs": self.realizable_pairs,
            "counterexamples": [p.as_dict() for p in self.counterexamples],
            "closed_form_infeasible": [p.as_dict() for p in self.closed_form_infeasible],
            "closed_form_equalities": self.closed_form_equalities,
            "printed_formula_mismatches": len(self.printed_formula_mismatches),
            "identity_findings": self.identity_findings,
            "interpretation": WAIVER_NOTE,
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.certificate(), indent=2)


def verify_theorem3(G: RegularGraphSpec) -> SweepReport:
    """Solve the program for every realizable pair and certify ``xi <= k/2``.

    Ties for the maximum go to the lexicographically smallest
    ``(sorted H, lam)`` encoding.
    """
    if not G.is_regular(3):
        raise ValueError("G must be 3-regular")
    if G.k > 10:
        raise ValueError("sweep is limited to k <= 10")
    half = Fraction(G.k, 2)
    best: tuple[Fraction, tuple, TypePair] | None = None
    checked = realizable = 0
    report = SweepReport(G, Fraction(0), None, 0, 0)  # type: ignore[arg-type]
    for tp in candidate_pairs(G):
        checked += 1
        if not is_realizable(tp):
            continue
        realizable += 1
        out = solve_xi(tp)
        if not out.feasible:
            report.counterexamples.append(tp)
            continue
        if out.xi > half:
            report.counterexamples.append(tp)
        if not out.closed_form_feasible or out.closed_form_objective > half:
            report.closed_form_infeasible.append(tp)
        if out.xi == out.closed_form_objective:
            report.closed_form_equalities += 1
        cc = class_counts(tp)
        if cc.printed_objective != out.closed_form_objective:
            report.printed_formula_mismatches.append(tp)
        if not (cc.double_count_identity and cc.size_identity):
            report.identity_findings.append({
                **tp.as_dict(), "class_counts": list(cc.counts),
                "double_count_identity": cc.double_count_identity,
                "size_identity": cc.size_identity,
                "identity_expected": cc.identity_expected,
            })
        key = (-out.xi, tp.encoding())
        if best is None or key < best[1]:
            best = (out.xi, key, tp)
    report.pairs_checked = checked
    report.realizable_pairs = realizable
    if best is not None:
        report.max_xi, report.argmax = best[0], best[2]
    return report


# ---------------------------------------------------------------------------
# base case


@dataclass(frozen=True)
class BaseCaseResult:
    ok: bool
    precondition_ok: bool
    small_parts: int
    message: str = ""


def base_case_check(G: RegularGraphSpec, parts: Sequence[Sequence[R3Point]],
                    lengths: dict[tuple[int, int], Fraction] | None = None) -> BaseCaseResult:
    """On a tuple of type ``G``, at least ``k/2`` parts have at most 2 points.

    ``lengths`` gives the required squared length per G-edge (default 1).
    A tuple that is not of type ``G`` is reported, not checked.
    """
    if len(parts) != G.k:
        return BaseCaseResult(False, False, 0, "need one part per vertex of G")
    for a, b in G.edges:
        target = (lengths or {}).get((a, b), Fraction(1))
        for p in parts[a]:
            for q in parts[b]:
                if squared_distance_r3(p, q) != target:
                    return BaseCaseResult(False, False, 0,
                                          f"parts {a} and {b} are not all at the required distance")
    small = sum(1 for part in parts if len(part) <= 2)
    return BaseCaseResult(2 * small >= G.k, True, small)
