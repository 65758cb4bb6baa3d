"""Box tensor product of a type A pattern module with a type D companion module.

The result is the associated graded knot Floer complex of the satellite over
F_2[U].  Gradings live in the double coset <g> \\ G~ / <h> and are reduced to
the normal form lambda^a u^b.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from math import gcd

from .algebra import CanonicalGrading, coset_reduce, gr_compose
from .cfd import GradedTypeD, TypeDModule, build_cfd, grade_cfd
from .gf2 import row_reduce
from .laurent import Laurent
from .pattern import EnumerationBudgetExceeded, GradedTypeA, TypeAModule


class TensorError(RuntimeError):
    pass


class NormalizationError(TensorError):
    """The U = 1 collapse does not have rank one."""


@dataclass(frozen=True, order=True)
class UArrow:
    src: tuple
    dst: tuple
    u: int


@dataclass
class UComplex:
    generators: list  # [(a_gen, d_gen)]
    arrows: list  # [UArrow]
    gradings: dict = field(default_factory=dict)  # generator -> CanonicalGrading

    def name(self, gen: tuple) -> str:
        return f"{gen[0]}*{gen[1]}"

    def outgoing(self) -> dict:
        out = defaultdict(list)
        for a in self.arrows:
            out[a.src].append(a)
        return out

    def incoming(self) -> dict:
        inc = defaultdict(list)
        for a in self.arrows:
            inc[a.dst].append(a)
        return inc


def _prefixes(module: TypeAModule) -> dict:
    """source -> chord-sequence prefixes of its operations and of the cut-off searches."""
    pre = defaultdict(set)
    seqs = [(op.source, op.chords) for op in module.operations]
    seqs += list(module.overflow)
    if not module.chord_cap_saturated:
        seqs += list(module.frontier)
    for source, chords in seqs:
        for k in range(len(chords) + 1):
            pre[source].add(chords[:k])
    return pre


def box_tensor(A: TypeAModule, D: TypeDModule) -> UComplex:
    """d(x * y) = sum over m_{k+1}(x, rho_I1..rho_Ik) * (end of a D-path I1..Ik from y)."""
    a_idem = A.idempotents
    d_idem = {g.id: g.idempotent for g in D.generators}
    gens = sorted((x, y) for x in a_idem for y in d_idem if a_idem[x] == d_idem[y])
    ops = A.index()
    prefixes = _prefixes(A)
    d_out = D.outgoing()
    counts: dict = defaultdict(int)
    for x, y in gens:
        allowed = prefixes.get(x, set())
        stack = [(y, ())]
        while stack:
            end, seq = stack.pop()
            if (x, seq) in A.overflow:
                raise EnumerationBudgetExceeded(
                    f"{x} with {seq} needs domains above the w-multiplicity cap {A.caps.get('wmult')}"
                )
            if (x, seq) in A.frontier and d_out.get(end) and not A.chord_cap_saturated:
                raise EnumerationBudgetExceeded(
                    f"{x} with {seq} needs chord sequences longer than {A.caps.get('chordlen')}"
                )
            for op in ops.get((x, seq), ()):
                counts[((x, y), (op.target, end), op.upower)] += 1
            for arrow in d_out.get(end, ()):
                nxt = seq + (arrow.chord,)
                if nxt in allowed:
                    stack.append((arrow.dst, nxt))
    arrows = sorted(UArrow(s, t, u) for (s, t, u), c in counts.items() if c % 2)
    return UComplex(gens, arrows)


def d_squared(C: UComplex) -> list:
    """Nonzero coefficients of d o d, as (src, dst, U-power)."""
    out = C.outgoing()
    acc: dict = defaultdict(int)
    for a in C.arrows:
        for b in out.get(a.dst, ()):
            acc[(a.src, b.dst, a.u + b.u)] += 1
    return sorted(k for k, v in acc.items() if v % 2)


def attach_gradings(C: UComplex, GA: GradedTypeA, GD: GradedTypeD) -> UComplex:
    gr = {}
    for x, y in C.generators:
        gr[(x, y)] = coset_reduce(gr_compose(GA.gradings[x], GD.gradings[y]), GA.g, GD.h)
    C.gradings = gr
    return C


def grading_violations(C: UComplex) -> list:
    """Arrows that do not drop a by one and b by their U-power."""
    bad = []
    for ar in C.arrows:
        s, t = C.gradings[ar.src], C.gradings[ar.dst]
        if t.a != s.a - 1 or t.b != s.b - ar.u:
            bad.append((ar, s, t))
    return bad


# ---------------------------------------------------------------------------
# homology


def hfk_hat(C: UComplex) -> dict:
    """Ranks of the U = 0 homology, keyed by canonical grading (a, b)."""
    if not C.gradings and C.generators:
        raise TensorError("hfk_hat needs a graded complex")
    blocks = defaultdict(list)
    for g in C.generators:
        blocks[C.gradings[g]].append(g)
    index = {}
    for key, members in blocks.items():
        for i, g in enumerate(members):
            index[g] = (key, i)
    # boundary map from block (a, b) to block (a - 1, b)
    rows = defaultdict(lambda: defaultdict(int))
    for ar in C.arrows:
        if ar.u:
            continue
        src_key, i = index[ar.src]
        _, j = index[ar.dst]
        rows[src_key][i] ^= 1 << j
    ranks = {}
    for key, members in blocks.items():
        out_rank = len(row_reduce(rows[key].values()))
        below = CanonicalGrading(key.a + 1, key.b)
        in_rank = len(row_reduce(rows[below].values())) if below in blocks else 0
        h = len(members) - out_rank - in_rank
        if h:
            ranks[(key.a, key.b)] = h
    return dict(sorted(ranks.items()))


def collapse_rank(C: UComplex) -> dict:
    """Ranks of the homology with U = 1, keyed by a."""
    blocks = defaultdict(list)
    for g in C.generators:
        blocks[C.gradings[g].a].append(g)
    index = {}
    for a, members in blocks.items():
        for i, g in enumerate(members):
            index[g] = i
    rows = defaultdict(lambda: defaultdict(int))
    for ar in C.arrows:
        rows[C.gradings[ar.src].a][index[ar.src]] ^= 1 << index[ar.dst]
    ranks = {}
    for a, members in blocks.items():
        h = (
            len(members)
            - len(row_reduce(rows[a].values()))
            - (len(row_reduce(rows[a + 1].values())) if a + 1 in blocks else 0)
        )
        if h:
            ranks[a] = h
    return dict(sorted(ranks.items()))


# ---------------------------------------------------------------------------
# absolute gradings


@dataclass
class Normalization:
    """A = sign * b + shift_b, N = a + shift_a, M = N + 2A."""

    shift_a: int
    sign: int
    shift_b2: int  # doubled, the symmetry centre may be a half-integer before checks

    def alexander(self, b: int) -> int:
        v = 2 * self.sign * b + self.shift_b2
        if v % 2:
            raise NormalizationError("Alexander grading is not an integer")
        return v // 2

    def absolute(self, a: int, b: int) -> tuple:
        A = self.alexander(b)
        return A, a + self.shift_a + 2 * A


def symmetric(ranks: dict) -> bool:
    return all(ranks.get((-A, M - 2 * A), 0) == r for (A, M), r in ranks.items())


def normalize_gradings(C: UComplex, canonical: dict | None = None) -> tuple:
    """Absolute (A, M) ranks and the normalisation used."""
    canonical = hfk_hat(C) if canonical is None else canonical
    collapsed = collapse_rank(C)
    if sum(collapsed.values()) != 1:
        raise NormalizationError(f"U = 1 homology has rank {sum(collapsed.values())}, not 1")
    (a0,) = collapsed
    if not canonical:
        raise NormalizationError("empty homology")
    for sign in (1, -1):
        vals = [sign * b for (_, b) in canonical]
        norm = Normalization(-a0, sign, -(min(vals) + max(vals)))
        try:
            ranks = {norm.absolute(a, b): r for (a, b), r in canonical.items()}
        except NormalizationError:
            continue
        if symmetric(ranks):
            return dict(sorted(ranks.items())), norm
    raise NormalizationError("no choice of Alexander sign makes the ranks symmetric")


def euler_poly(ranks: dict) -> Laurent:
    acc: dict = defaultdict(int)
    for (A, M), r in ranks.items():
        acc[A] += (-1) ** (M % 2) * r
    return Laurent.from_dict(acc)


def cable_alexander(delta_k: Laurent, p: int, q: int) -> Laurent:
    """Delta_K(t^p) times the Alexander polynomial of T(p, q)."""
    if not delta_k.is_symmetric() or delta_k.evaluate(1) != 1:
        raise ValueError("companion polynomial must be symmetric with value 1 at t = 1")
    if p < 1 or gcd(p, q) != 1:
        raise ValueError(f"cable parameters ({p}, {q}) must be coprime with p >= 1")
    q = abs(q)
    one = Laurent.monomial(0)
    num = (Laurent.monomial(p * q) - one) * (Laurent.monomial(1) - one)
    den = (Laurent.monomial(p) - one) * (Laurent.monomial(q) - one)
    quo, rem = num.divmod(den)
    if rem != Laurent.from_dict({}):
        raise ValueError(f"T({p},{q}) quotient has a remainder")
    return (delta_k.substitute_power(p) * quo.symmetrize()).symmetrize()


def verify_cycle_nonzero(C: UComplex, elt: tuple) -> bool:
    """Every term of d(elt) has positive U-power and nothing hits elt with U^0."""
    if any(ar.u == 0 for ar in C.outgoing().get(elt, ())):
        return False
    return not any(ar.u == 0 for ar in C.incoming().get(elt, ()))


# ---------------------------------------------------------------------------
# whole pipeline


@dataclass
class CableResult:
    complex: UComplex
    canonical: dict  # (a, b) -> rank
    ranks: dict  # (A, M) -> rank
    normalization: Normalization

    @property
    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def deltas(self) -> list:
        return sorted({M - A for (A, M) in self.ranks})

    def absolute(self, gen: tuple) -> tuple:
        c = self.complex.gradings[gen]
        return self.normalization.absolute(c.a, c.b)


def cable_complex(C, pattern, r: int) -> UComplex:
    """Graded box tensor of a pattern (PatternData) with CFD of the companion at framing r."""
    D = build_cfd(C, r)
    T = box_tensor(pattern.module, D)
    return attach_gradings(T, pattern.graded, grade_cfd(D))


def cable_homology(C, pattern, r: int) -> CableResult:
    T = cable_complex(C, pattern, r)
    canonical = hfk_hat(T)
    ranks, norm = normalize_gradings(T, canonical)
    return CableResult(T, canonical, ranks, norm)
