"""Type D module of the r-framed knot complement, built from a model CFK^-.

The iota_0 part is spanned by a basis of CFK^- that is simultaneously
vertically and horizontally simplified.  Each vertical arrow of length l
contributes a chain of l iota_1 generators, each horizontal arrow of length k
a chain of k, and the framing adds the unstable chain of |t| generators with
t = 2 tau - r.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field

from .algebra import (
    CHORD_IDEMPOTENTS,
    AlgebraElement,
    ExtendedGrading,
    IDENTITY,
    alg_mul,
    gr_compose,
    gr_invert,
    gr_of_chord,
    gr_power,
    gr_product,
    lam,
)
from .cfk import ModelComplex, simultaneous_basis, tau as tau_of


class GradingInconsistency(RuntimeError):
    pass


@dataclass(frozen=True)
class DGenerator:
    id: str
    idempotent: str  # "i0" | "i1"
    role: str  # xi | kappa(i,pos) | hchain(j,pos) | mu(pos)


@dataclass(frozen=True, order=True)
class DArrow:
    src: str
    dst: str
    chord: str


@dataclass
class TypeDModule:
    generators: list
    arrows: list
    framing: int
    t: int
    complex: ModelComplex = None
    xi0: str = ""
    eta0: str = ""
    vertical: tuple = ()
    horizontal: tuple = ()

    def gen(self, gid: str) -> DGenerator:
        for g in self.generators:
            if g.id == gid:
                return g
        raise KeyError(gid)

    @property
    def ids(self) -> list:
        return [g.id for g in self.generators]

    def outgoing(self) -> dict:
        out = defaultdict(list)
        for a in self.arrows:
            out[a.src].append(a)
        return out

    def kappa(self, pair_index: int, pos: int) -> str:
        return f"kappa{pair_index}_{pos}"

    def to_json(self, gradings: dict | None = None) -> dict:
        gens = []
        for g in self.generators:
            item = {"id": g.id, "idempotent": g.idempotent, "role": g.role}
            if gradings is not None:
                item["grading"] = grading_json(gradings[g.id])
            gens.append(item)
        return {
            "framing": self.framing,
            "t": self.t,
            "generators": gens,
            "arrows": [{"src": a.src, "dst": a.dst, "chord": a.chord} for a in self.arrows],
        }


def grading_json(g: ExtendedGrading) -> dict:
    def half(v2):
        return str(v2 // 2) if v2 % 2 == 0 else f"{v2}/2"

    return {"m": half(g.m2), "i": half(g.i2), "j": half(g.j2), "n": g.n}


def build_cfd(C: ModelComplex, r: int) -> TypeDModule:
    D, vert, hor = simultaneous_basis(C)
    t = 2 * tau_of(D) - r
    gens = [DGenerator(g.id, "i0", "xi") for g in D.generators]
    arrows = []
    for i, (src, dst, length) in enumerate(vert.pairs, 1):
        names = [f"kappa{i}_{m}" for m in range(1, length + 1)]
        gens += [DGenerator(n, "i1", f"kappa({i},{m})") for m, n in enumerate(names, 1)]
        arrows.append(DArrow(src, names[0], "1"))
        for m in range(1, length):
            arrows.append(DArrow(names[m], names[m - 1], "23"))
        arrows.append(DArrow(dst, names[-1], "123"))
    for j, (src, dst, length) in enumerate(hor.pairs, 1):
        names = [f"hchain{j}_{m}" for m in range(1, length + 1)]
        gens += [DGenerator(n, "i1", f"hchain({j},{m})") for m, n in enumerate(names, 1)]
        arrows.append(DArrow(src, names[0], "3"))
        for m in range(1, length):
            arrows.append(DArrow(names[m - 1], names[m], "23"))
        arrows.append(DArrow(names[-1], dst, "2"))
    xi0, eta0 = vert.distinguished, hor.distinguished
    mus = [f"mu{m}" for m in range(1, abs(t) + 1)]
    gens += [DGenerator(n, "i1", f"mu({m})") for m, n in enumerate(mus, 1)]
    if t > 0:
        arrows.append(DArrow(xi0, mus[0], "1"))
        for m in range(1, t):
            arrows.append(DArrow(mus[m], mus[m - 1], "23"))
        # the far end of the chain is eta_0, mirroring the t < 0 case
        arrows.append(DArrow(eta0, mus[-1], "3"))
    elif t == 0:
        arrows.append(DArrow(xi0, eta0, "12"))
    else:
        arrows.append(DArrow(xi0, mus[0], "123"))
        for m in range(1, -t):
            arrows.append(DArrow(mus[m - 1], mus[m], "23"))
        arrows.append(DArrow(mus[-1], eta0, "2"))
    return TypeDModule(
        generators=gens,
        arrows=sorted(arrows),
        framing=r,
        t=t,
        complex=D,
        xi0=xi0,
        eta0=eta0,
        vertical=vert.pairs,
        horizontal=hor.pairs,
    )


# ---------------------------------------------------------------------------
# checks


@dataclass
class TypeDReport:
    issues: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues


def check_typeD(D: TypeDModule) -> TypeDReport:
    """delta^1 composed with itself vanishes."""
    rep = TypeDReport()
    idem = {g.id: g.idempotent for g in D.generators}
    for a in D.arrows:
        left, right = CHORD_IDEMPOTENTS[a.chord]
        if idem[a.src] != left or idem[a.dst] != right:
            rep.issues.append(f"idempotents do not match on {a.src} -rho{a.chord}-> {a.dst}")
    out = D.outgoing()
    acc: dict = defaultdict(lambda: AlgebraElement())
    for a in D.arrows:
        for b in out[a.dst]:
            prod = alg_mul(AlgebraElement.of(a.chord), AlgebraElement.of(b.chord))
            acc[(a.src, b.dst)] = acc[(a.src, b.dst)] + prod
    for (x, z), elt in sorted(acc.items()):
        if not elt.is_zero():
            rep.issues.append(f"delta^2 of {x} has {elt!r} on {z}")
    return rep


# ---------------------------------------------------------------------------
# gradings


def h_period(r: int) -> ExtendedGrading:
    """lambda^(-1-2r) gr(rho_12)^-1 gr(rho_23)^-r.

    At r = 0 this is the usual lambda^-1 gr(rho_12)^-1.  For r != 0 the extra
    lambda^-2r is what makes the unstable chain close up: with the bare
    lambda^-1 the two ends of the chain disagree by a power of lambda.
    """
    return gr_product(
        [lam(-1 - 2 * r), gr_invert(gr_of_chord("12")), gr_power(gr_of_chord("23"), -r)]
    )


def h_period_literal(r: int) -> ExtendedGrading:
    """lambda^-1 gr(rho_12)^-1 gr(rho_23)^-r, kept for comparison."""
    return gr_product(
        [lam(-1), gr_invert(gr_of_chord("12")), gr_power(gr_of_chord("23"), -r)]
    )


def iota0_grading(A: int, M: int) -> ExtendedGrading:
    return gr_compose(lam(M - 2 * A), gr_power(gr_of_chord("23"), -A))


@dataclass
class GradedTypeD:
    module: TypeDModule
    gradings: dict
    h: ExtendedGrading


def right_period_exponent(diff: ExtendedGrading, h: ExtendedGrading) -> int | None:
    """t with diff = h^t, or None."""
    for v, hv in ((diff.i2, h.i2), (diff.j2, h.j2)):
        if hv:
            if v % hv:
                return None
            t = v // hv
            return t if gr_power(h, t) == diff else None
    return 0 if diff == IDENTITY else None


def grade_cfd(D: TypeDModule, C: ModelComplex | None = None) -> GradedTypeD:
    C = D.complex if C is None else C
    h = h_period(D.framing)
    gr: dict = {}
    for g in C.generators:
        gr[g.id] = iota0_grading(g.A, g.M)
    nbrs = defaultdict(list)
    for a in D.arrows:
        nbrs[a.src].append(a)
        nbrs[a.dst].append(a)
    queue = deque(gr)
    while queue:
        x = queue.popleft()
        for a in nbrs[x]:
            step = gr_compose(lam(-1), gr_invert(gr_of_chord(a.chord)))
            if a.src == x and a.dst not in gr:
                gr[a.dst] = gr_compose(step, gr[x])
                queue.append(a.dst)
            elif a.dst == x and a.src not in gr:
                gr[a.src] = gr_compose(gr_invert(step), gr[x])
                queue.append(a.src)
    for a in D.arrows:
        step = gr_compose(lam(-1), gr_invert(gr_of_chord(a.chord)))
        want = gr_compose(step, gr[a.src])
        diff = gr_compose(gr_invert(gr[a.dst]), want)
        if right_period_exponent(diff, h) is None:
            raise GradingInconsistency(
                f"arrow {a.src} -rho{a.chord}-> {a.dst}: gradings differ by {diff}, not a power of h"
            )
    missing = [g for g in D.ids if g not in gr]
    if missing:
        raise GradingInconsistency(f"ungraded generators {missing}")
    return GradedTypeD(D, gr, h)
