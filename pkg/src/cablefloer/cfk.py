"""Model CFK^- complexes of companion knots.

A complex is a finite list of generators with Alexander and Maslov gradings
and arrows x -> U^k y.  Conventions: the arrow drops Maslov by 1 - 2k, the
filtration level of U^k y is A(y) - k, and the complex is reduced, so every
arrow strictly drops at least one of the two filtrations.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field

from . import gf2
from .laurent import Laurent


class ComplexError(ValueError):
    pass


class ComplexSyntaxError(ComplexError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


class BasisError(ComplexError):
    """No simultaneously vertically and horizontally simplified basis was found."""


@dataclass(frozen=True)
class Generator:
    id: str
    A: int
    M: int


@dataclass(frozen=True, order=True)
class Arrow:
    src: str
    dst: str
    k: int = 0


@dataclass(frozen=True)
class ModelComplex:
    generators: tuple
    arrows: tuple
    name: str = ""

    @classmethod
    def build(cls, gens, arrows, name: str = "") -> "ModelComplex":
        g = tuple(Generator(i, int(a), int(m)) for i, a, m in gens)
        ar = tuple(sorted(Arrow(s, d, int(k)) for s, d, k in arrows))
        return cls(g, ar, name)

    def gen(self, gid: str) -> Generator:
        for g in self.generators:
            if g.id == gid:
                return g
        raise KeyError(gid)

    @property
    def ids(self) -> list:
        return [g.id for g in self.generators]

    def grading(self) -> dict:
        return {g.id: (g.A, g.M) for g in self.generators}

    def is_vertical(self, arrow: Arrow) -> bool:
        return arrow.k == 0

    def is_horizontal(self, arrow: Arrow) -> bool:
        return arrow.k > 0 and self.gen(arrow.dst).A - arrow.k == self.gen(arrow.src).A

    def with_name(self, name: str) -> "ModelComplex":
        return ModelComplex(self.generators, self.arrows, name)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self) -> str:
        return "valid" if self.ok else "\n".join(self.issues)


def validate_complex(C: ModelComplex) -> ValidationReport:
    rep = ValidationReport()
    seen = set()
    for g in C.generators:
        if g.id in seen:
            rep.issues.append(f"duplicate generator id {g.id}")
        seen.add(g.id)
    grades = {g.id: g for g in C.generators}
    for ar in C.arrows:
        if ar.src not in grades or ar.dst not in grades:
            rep.issues.append(f"arrow {ar.src}->{ar.dst} has a missing endpoint")
            continue
        if ar.k < 0:
            rep.issues.append(f"arrow {ar.src}->{ar.dst} has negative U-power {ar.k}")
        s, t = grades[ar.src], grades[ar.dst]
        if s.M - t.M != 1 - 2 * ar.k:
            rep.issues.append(
                f"arrow {ar.src}->{ar.dst} with U^{ar.k}: Maslov drop {s.M - t.M} != {1 - 2 * ar.k}"
            )
        if t.A - ar.k > s.A:
            rep.issues.append(f"arrow {ar.src}->{ar.dst} raises the Alexander filtration")
        if ar.k == 0 and t.A >= s.A:
            rep.issues.append(f"arrow {ar.src}->{ar.dst} with U^0 does not drop A (not reduced)")
    if len(C.generators) % 2 == 0:
        rep.issues.append(f"even number of generators ({len(C.generators)})")
    if rep.ok:
        for (src, dst, k) in d_squared(C):
            rep.issues.append(f"d^2 != 0: {src} -> U^{k} {dst}")
    return rep


def d_squared(C: ModelComplex) -> list:
    out = defaultdict(list)
    for ar in C.arrows:
        out[ar.src].append(ar)
    acc = defaultdict(int)
    for a1 in C.arrows:
        for a2 in out[a1.dst]:
            acc[(a1.src, a2.dst, a1.k + a2.k)] += 1
    return sorted(key for key, c in acc.items() if c % 2)


# ---------------------------------------------------------------------------
# simplified bases


@dataclass(frozen=True)
class SimplifiedBasis:
    direction: str  # "vertical" | "horizontal"
    pairs: tuple  # (source, target, length)
    distinguished: str


def _matching(C: ModelComplex, arrows: list, direction: str) -> SimplifiedBasis | None:
    outs, ins = defaultdict(list), defaultdict(list)
    for ar in arrows:
        outs[ar.src].append(ar)
        ins[ar.dst].append(ar)
    if any(len(v) > 1 for v in outs.values()) or any(len(v) > 1 for v in ins.values()):
        return None
    if set(outs) & set(ins):
        return None
    free = [g for g in C.ids if g not in outs and g not in ins]
    if len(free) != 1:
        return None
    pairs = []
    for ar in arrows:
        s, t = C.gen(ar.src), C.gen(ar.dst)
        length = s.A - t.A if direction == "vertical" else t.A - s.A
        pairs.append((ar.src, ar.dst, length))
    return SimplifiedBasis(direction, tuple(sorted(pairs)), free[0])


def _vertical_arrows(C):
    return [a for a in C.arrows if C.is_vertical(a)]


def _horizontal_arrows(C):
    return [a for a in C.arrows if C.is_horizontal(a)]


def _persistence_rebase(C: ModelComplex) -> ModelComplex:
    """Filtered change of basis that puts the U^0 part in paired normal form.

    This is the standard column reduction of persistent homology applied to
    the vertical complex, filtered by Alexander grading; generators are only
    ever replaced by sums with terms of lower or equal Alexander grading and
    the same Maslov grading.  The full differential is then rewritten in the
    new basis.
    """
    order = sorted(C.generators, key=lambda g: (g.A, g.M, g.id))
    idx = {g.id: k for k, g in enumerate(order)}
    n = len(order)
    cols = [0] * n  # vertical differential, bit = target index
    for ar in _vertical_arrows(C):
        cols[idx[ar.src]] |= 1 << idx[ar.dst]
    V = [1 << k for k in range(n)]
    R = cols[:]
    low_owner: dict[int, int] = {}
    for j in range(n):
        while R[j]:
            low = R[j].bit_length() - 1
            other = low_owner.get(low)
            if other is None:
                break
            R[j] ^= R[other]
            V[j] ^= V[other]
        if R[j]:
            low_owner[R[j].bit_length() - 1] = j
    new_basis = list(V)
    for low, j in low_owner.items():
        new_basis[low] = R[j]
    return _rebase(C, order, new_basis)


def _rebase(C: ModelComplex, order: list, new_basis: list) -> ModelComplex:
    n = len(order)
    if gf2.rank(new_basis) != n:
        raise BasisError("filtered change of basis is singular")
    names = []
    for vec in new_basis:
        names.append("+".join(order[k].id for k in gf2.bits(vec)))
    # express d(new_j) in the new basis; U-powers follow from the Maslov gradings
    d_old = defaultdict(int)
    for ar in C.arrows:
        d_old[_idx_of(order, ar.src)] ^= 1 << _idx_of(order, ar.dst)
    inv = _inverse(new_basis, n)
    arrows = []
    gens = []
    for j, vec in enumerate(new_basis):
        terms = [order[k] for k in gf2.bits(vec)]
        gens.append((names[j], max(t.A for t in terms), terms[0].M))
    for j, vec in enumerate(new_basis):
        image = 0
        for k in gf2.bits(vec):
            image ^= d_old[k]
        coords = 0
        for k in gf2.bits(image):
            coords ^= inv[k]
        for t in gf2.bits(coords):
            kpow = (1 - gens[j][2] + gens[t][2]) // 2
            arrows.append((names[j], names[t], kpow))
    return ModelComplex.build(gens, arrows, C.name)


def _idx_of(order, gid):
    for k, g in enumerate(order):
        if g.id == gid:
            return k
    raise KeyError(gid)


def _inverse(vectors: list, n: int) -> list:
    """inv[k] = coordinates of the old basis vector e_k in terms of `vectors`."""
    aug = [(v, 1 << j) for j, v in enumerate(vectors)]
    pivots: dict[int, tuple[int, int]] = {}
    for v, tag in aug:
        while v:
            lead = v.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = (v, tag)
                break
            pv, pt = pivots[lead]
            v ^= pv
            tag ^= pt
    inv = []
    for k in range(n):
        v, tag = 1 << k, 0
        while v:
            lead = v.bit_length() - 1
            pv, pt = pivots[lead]
            v ^= pv
            tag ^= pt
        inv.append(tag)
    return inv


def simplify_vertical(C: ModelComplex) -> SimplifiedBasis:
    basis = _matching(C, _vertical_arrows(C), "vertical")
    if basis is None:
        raise BasisError(f"{C.name or 'complex'}: given basis is not vertically simplified")
    return basis


def simplify_horizontal(C: ModelComplex) -> SimplifiedBasis:
    basis = _matching(C, _horizontal_arrows(C), "horizontal")
    if basis is None:
        raise BasisError(f"{C.name or 'complex'}: given basis is not horizontally simplified")
    return basis


def simultaneous_basis(C: ModelComplex) -> tuple:
    """(complex in a good basis, vertical basis, horizontal basis)."""
    for candidate in (C, None):
        if candidate is None:
            candidate = _persistence_rebase(C)
        v = _matching(candidate, _vertical_arrows(candidate), "vertical")
        h = _matching(candidate, _horizontal_arrows(candidate), "horizontal")
        if v is not None and h is not None:
            return candidate, v, h
    obstruct = sorted(
        {a.src for a in C.arrows if not C.is_vertical(a) and not C.is_horizontal(a)}
    )
    raise BasisError(
        "no simultaneously simplified basis found"
        + (f"; diagonal arrows leave {', '.join(obstruct)}" if obstruct else "")
    )


# ---------------------------------------------------------------------------
# concordance invariants


def tau(C: ModelComplex) -> int:
    D, v, _ = simultaneous_basis(C)
    return D.gen(v.distinguished).A


def tau_from_definition(C: ModelComplex) -> int:
    """tau straight from the definition: the least s with C{i=0, j<=s} onto H."""
    ids = C.ids
    idx = {g: k for k, g in enumerate(ids)}
    grades = {g.id: g for g in C.generators}
    cols = [0] * len(ids)
    for ar in _vertical_arrows(C):
        cols[idx[ar.src]] |= 1 << idx[ar.dst]
    boundaries = gf2.row_reduce(cols)
    cycles = gf2.kernel(cols, len(ids))
    for s in sorted({g.A for g in C.generators}):
        sub_cycles = [z for z in cycles if all(grades[ids[k]].A <= s for k in gf2.bits(z))]
        if any(gf2.reduce_against(z, boundaries) for z in sub_cycles):
            return s
    raise ComplexError("vertical homology vanishes")


def nu(C: ModelComplex) -> int:
    """min s such that the projection A_s -> C{i=0} is onto in homology."""
    grades = {g.id: g for g in C.generators}
    ids = C.ids
    idx = {g: k for k, g in enumerate(ids)}
    n = len(ids)
    # B = C{i=0} with the U^0 part of the differential
    b_cols = [0] * n
    for ar in C.arrows:
        if ar.k == 0:
            b_cols[idx[ar.src]] |= 1 << idx[ar.dst]
    b_bound = gf2.row_reduce(b_cols)
    lo = min(g.A for g in C.generators) - 1
    hi = max(g.A for g in C.generators) + 1
    for s in range(lo, hi + 1):
        # A_s has one copy U^{n_x} x of each generator, n_x = max(0, A - s)
        level = {g: max(0, grades[g].A - s) for g in ids}
        cols = [0] * n
        for ar in C.arrows:
            if level[ar.src] + ar.k == level[ar.dst]:
                cols[idx[ar.src]] |= 1 << idx[ar.dst]
        for z in gf2.kernel(cols, n):
            proj = 0
            for k in gf2.bits(z):
                if level[ids[k]] == 0:
                    proj |= 1 << k
            if gf2.reduce_against(proj, b_bound):
                return s
    raise ComplexError("no s makes the projection onto homology surjective")


def mirror(C: ModelComplex) -> ModelComplex:
    """Complex of the mirror: dual arrows, A -> -A, M -> -M, U-powers kept."""
    gens = [(g.id, -g.A, -g.M) for g in C.generators]
    arrows = [(a.dst, a.src, a.k) for a in C.arrows]
    name = C.name
    if name.endswith("_rh"):
        name = name[:-3] + "_lh"
    elif name.endswith("_lh"):
        name = name[:-3] + "_rh"
    elif name:
        name = f"mirror({name})"
    return ModelComplex.build(gens, arrows, name)


def _killed_horizontally(C: ModelComplex) -> bool:
    """xi_0 dies in the horizontal complex: U^tau xi_0 lies in the image of d^hor."""
    D, v, _ = simultaneous_basis(C)
    xi0 = v.distinguished
    return any(D.is_horizontal(a) and a.dst == xi0 for a in D.arrows)


def epsilon(C: ModelComplex) -> int:
    t, n = tau(C), nu(C)
    mt, mn = tau(mirror(C)), nu(mirror(C))
    if n == t + 1:
        by_nu = -1
    elif mn == mt + 1:
        by_nu = 1
    else:
        by_nu = 0
    structural = 1 if _killed_horizontally(C) else None
    if structural is not None and by_nu != structural:
        raise ComplexError(
            f"epsilon disagreement: nu route gives {by_nu}, xi_0 is killed horizontally"
        )
    if by_nu == 1 and not _killed_horizontally(C):
        raise ComplexError("epsilon disagreement: nu route gives 1 but xi_0 survives")
    return by_nu


def genus(C: ModelComplex) -> int:
    """Top Alexander grading carrying homology of the associated graded complex."""
    return max(abs(A) for A, r in hfk_ranks(C).items() if r)


def hfk_ranks(C: ModelComplex) -> dict:
    """Ranks of HFK-hat per Alexander grading (reduced complex: one per generator)."""
    out: dict[int, int] = defaultdict(int)
    for g in C.generators:
        out[g.A] += 1
    return dict(out)


def poincare(C: ModelComplex) -> dict:
    out: dict[tuple, int] = defaultdict(int)
    for g in C.generators:
        out[(g.A, g.M)] += 1
    return dict(out)


def euler_characteristic(C: ModelComplex) -> Laurent:
    acc: dict[int, int] = defaultdict(int)
    for g in C.generators:
        acc[g.A] += (-1) ** (g.M % 2)
    return Laurent.from_dict(acc)


# ---------------------------------------------------------------------------
# staircases and catalog


def staircase_from_alexander(delta: Laurent, name: str = "") -> ModelComplex:
    """Staircase of an L-space knot with the given Alexander polynomial."""
    terms = list(reversed(delta.coeffs))
    if not terms:
        raise ComplexError("zero polynomial")
    signs = [c for _, c in terms]
    if any(abs(c) != 1 for c in signs):
        raise ComplexError("staircase needs coefficients +-1")
    if any(signs[k] == signs[k + 1] for k in range(len(signs) - 1)):
        raise ComplexError("staircase needs alternating coefficients")
    if signs[0] != 1 or len(terms) % 2 == 0:
        raise ComplexError("staircase needs a leading +1 and odd length")
    exps = [e for e, _ in terms]
    if exps[0] != -exps[-1]:
        raise ComplexError("polynomial is not symmetric")
    gens = []
    M = 0
    for k, A in enumerate(exps):
        if k > 0:
            gap = exps[k - 1] - A
            # odd k is a source: U^gap x_{k-1} and x_{k+1} both sit one below it
            M = M + 1 - 2 * gap if k % 2 else M - 1
        gens.append((f"x{k + 1}", A, M))
    arrows = []
    for k in range(1, len(exps), 2):
        src = f"x{k + 1}"
        arrows.append((src, f"x{k + 2}", 0))
        arrows.append((src, f"x{k}", exps[k - 1] - exps[k]))
    return ModelComplex.build(gens, arrows, name)


def torus_alexander(a: int, b: int) -> Laurent:
    one = Laurent.monomial(0)
    t = lambda k: Laurent.monomial(k)  # noqa: E731
    num = (t(a * b) - one) * (t(1) - one)
    den = (t(a) - one) * (t(b) - one)
    q, r = num.divmod(den)
    if r.coeffs:
        raise ComplexError(f"T({a},{b}) polynomial division left a remainder")
    return q.symmetrize()


def _figure_eight() -> ModelComplex:
    gens = [("a", 0, 0), ("b", -1, -1), ("c", 1, 1), ("e", 0, 0), ("z", 0, 0)]
    arrows = [("a", "b", 0), ("a", "c", 1), ("b", "e", 1), ("c", "e", 0)]
    return ModelComplex.build(gens, arrows, "figure_eight")


_TORUS = re.compile(r"^torus\((-?\d+),(-?\d+)\)$")


def catalog_names() -> list:
    return ["unknot", "trefoil_rh", "trefoil_lh", "figure_eight", "torus(a,b)"]


def catalog_get(name: str) -> ModelComplex:
    key = name.replace(" ", "")
    if key == "unknot":
        return ModelComplex.build([("x0", 0, 0)], [], "unknot")
    if key == "trefoil_rh":
        gens = [("x1", 1, 0), ("x2", 0, -1), ("x3", -1, -2)]
        return ModelComplex.build(gens, [("x2", "x3", 0), ("x2", "x1", 1)], "trefoil_rh")
    if key == "trefoil_lh":
        return mirror(catalog_get("trefoil_rh")).with_name("trefoil_lh")
    if key == "figure_eight":
        return _figure_eight()
    m = _TORUS.match(key)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if abs(a) < 2 or abs(b) < 2:
            return catalog_get("unknot").with_name(f"torus({a},{b})")
        pos = staircase_from_alexander(torus_alexander(abs(a), abs(b)), f"torus({a},{b})")
        return pos if a * b > 0 else mirror(pos).with_name(f"torus({a},{b})")
    raise KeyError(f"unknown catalog knot {name!r}")


def catalog() -> dict:
    names = ["unknot", "trefoil_rh", "trefoil_lh", "figure_eight", "torus(2,5)", "torus(3,4)"]
    return {n: catalog_get(n) for n in names}


# ---------------------------------------------------------------------------
# text format

_ID = r"[A-Za-z0-9_]+"
_GEN_RE = re.compile(rf"^gen\s+({_ID})\s+A=(-?\d+)\s+M=(-?\d+)$")
_ARROW_RE = re.compile(rf"^arrow\s+({_ID})\s+({_ID})\s+U=(\d+)$")


class DuplicateIdError(ComplexSyntaxError):
    pass


class DanglingArrowError(ComplexSyntaxError):
    pass


def parse_complex(text: str, name: str = "") -> ModelComplex:
    lines = text.splitlines()
    header_seen = False
    gens, arrows, seen = [], [], set()
    pending = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if line != "cfk v1":
                raise ComplexSyntaxError("expected header 'cfk v1'", lineno, 1)
            header_seen = True
            continue
        col = len(raw) - len(raw.lstrip()) + 1
        m = _GEN_RE.match(line)
        if m:
            gid = m.group(1)
            if gid in seen:
                raise DuplicateIdError(f"duplicate generator id {gid}", lineno, col)
            seen.add(gid)
            gens.append((gid, int(m.group(2)), int(m.group(3))))
            continue
        m = _ARROW_RE.match(line)
        if m:
            arrows.append((m.group(1), m.group(2), int(m.group(3))))
            pending.append((lineno, col, m.group(1), m.group(2)))
            continue
        raise ComplexSyntaxError(f"cannot parse {line!r}", lineno, col)
    if not header_seen:
        raise ComplexSyntaxError("empty input: missing 'cfk v1' header", 1, 1)
    for lineno, col, s, d in pending:
        for gid in (s, d):
            if gid not in seen:
                raise DanglingArrowError(f"arrow endpoint {gid} is not a generator", lineno, col)
    return ModelComplex.build(gens, arrows, name)


def emit_complex(C: ModelComplex) -> str:
    out = ["cfk v1"]
    if C.name:
        out.append(f"# {C.name}")
    for g in C.generators:
        out.append(f"gen {g.id} A={g.A} M={g.M}")
    for a in C.arrows:
        out.append(f"arrow {a.src} {a.dst} U={a.k}")
    return "\n".join(out) + "\n"
