"""The (p,q) torus pattern in the solid torus.

A genus-one doubly pointed bordered diagram is synthesised in the universal
cover of the torus and the type A operations of CFA^- are read off from
embedded polygons bounded by a lift of beta and a path in the alpha grid.

Coordinates: lattice points are the lifts of the boundary puncture; alpha_0 lifts
to the horizontal lines y in Z and alpha_1 to the vertical lines x in Z.  Around
a puncture the boundary circle meets the east, south, west and north rays in
the cyclic order a0, a1, a2, a3, so rho_1, rho_2, rho_3 sit in the SE, SW and
NW quadrants and the basepoint z in the NE quadrant.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd

import numpy as np

from .algebra import (
    CHORD_IDEMPOTENTS,
    ExtendedGrading,
    IDENTITY,
    chord_product,
    gr_compose,
    gr_invert,
    gr_of_chord,
    gr_power,
    gr_product,
    lam,
    upow,
)


class PatternParameterError(ValueError):
    """(p, q) outside the range handled by the torus-pattern construction."""


class EnumerationBudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# arithmetic


@dataclass(frozen=True)
class PatternArithmetic:
    p: int
    q: int
    x: int
    y: int
    u: int
    v: int

    @property
    def vx(self) -> int:
        return self.v * self.x

    @property
    def n_w(self) -> int:
        return self.vx + 1

    @property
    def hfk_rank(self) -> int:
        return 2 * self.vx - 1


def decompose_pq(p: int, q: int) -> PatternArithmetic:
    """The unique positive x, y, u, v with p = x+y, q = u+v and vx - uy = 1."""
    if q < 2 or q >= p:
        raise PatternParameterError(f"need p > q >= 2, got (p, q) = ({p}, {q})")
    if gcd(p, q) != 1:
        raise PatternParameterError(f"p and q must be coprime, got ({p}, {q})")
    # vx - uy = qx - pu, so x is the inverse of q mod p
    x = pow(q, -1, p)
    u = (q * x - 1) // p
    arith = PatternArithmetic(p, q, x, p - x, u, q - u)
    if min(arith.y, arith.u, arith.v) < 1:
        raise PatternParameterError(f"(p, q) = ({p}, {q}) has no positive splitting")
    return arith


# ---------------------------------------------------------------------------
# geometry helpers (exact)

Point = tuple  # (Fraction, Fraction)

EAST, NORTH, WEST, SOUTH = (1, 0), (0, 1), (-1, 0), (0, -1)

# arrival direction -> [(chord, exit direction)]
_CHORD_MOVES = {
    WEST: [("1", SOUTH), ("12", WEST), ("123", NORTH)],
    NORTH: [("2", WEST), ("23", NORTH)],
    EAST: [("3", NORTH)],
    SOUTH: [],
}

QUADRANTS = {"NE": (1, 1), "SE": (1, -1), "SW": (-1, -1), "NW": (-1, 1)}
CHORD_QUADRANTS = {
    "1": {"SE"},
    "2": {"SW"},
    "3": {"NW"},
    "12": {"SE", "SW"},
    "23": {"SW", "NW"},
    "123": {"SE", "SW", "NW"},
}


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segments_cross(p1, p2, p3, p4) -> bool:
    """Closed segments p1p2 and p3p4 intersect."""
    d1 = _cross(p3, p4, p1)
    d2 = _cross(p3, p4, p2)
    d3 = _cross(p1, p2, p3)
    d4 = _cross(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(
            a[1], b[1]
        )

    if d1 == 0 and on_seg(p3, p4, p1):
        return True
    if d2 == 0 and on_seg(p3, p4, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, p3):
        return True
    if d4 == 0 and on_seg(p1, p2, p4):
        return True
    return False


# ---------------------------------------------------------------------------
# diagram


@dataclass(frozen=True)
class Intersection:
    """A point of beta meeting an alpha arc, in the fundamental lift of beta."""

    name: str
    arc: int  # 0 for alpha_0 (horizontal), 1 for alpha_1 (vertical)
    point: tuple
    s: Fraction  # parameter along the lift; door k sits at s = k

    @property
    def idempotent(self) -> str:
        return f"i{self.arc}"


@dataclass
class BorderedDiagram:
    """Genus-one doubly pointed bordered diagram H(p,q), lifted to the plane.

    beta is the pulled-tight lift of the meridian of the solid torus: it crosses
    the lifts of the torus-knot curve only through the short arc between the
    puncture (where z sits) and w.  ``doors`` holds one period of its vertices.
    """

    arith: PatternArithmetic
    doors: list  # D_0 .. D_p, D_p = D_0 + (0, 1)
    door_lattice: list  # lattice points L_0 .. L_p next to each door
    w_offset: Fraction
    z_offset: Fraction
    generators: list = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.arith.p

    @property
    def q(self) -> int:
        return self.arith.q

    @property
    def direction(self) -> tuple:
        return (self.arith.p, self.arith.q)

    def door(self, k: int):
        per, r = divmod(k, self.p)
        d = self.doors[r]
        return (d[0], d[1] + per)

    @property
    def periodic_w(self) -> int:
        """w-multiplicity of the primitive periodic domain.

        beta meets each lift of the knot curve once per period, so the periodic
        domain covers w exactly p times (the winding number of the pattern).
        """
        return self.arith.p

    def w_point(self, lattice) -> tuple:
        return (
            lattice[0] + self.w_offset * self.p,
            lattice[1] + self.w_offset * self.q,
        )

    def point_at(self, gen: Intersection, period: int) -> tuple:
        return (gen.point[0], gen.point[1] + period)

    def gen(self, name: str) -> Intersection:
        for g in self.generators:
            if g.name == name:
                return g
        raise KeyError(name)


def build_diagram(p: int, q: int) -> BorderedDiagram:
    arith = decompose_pq(p, q)
    x, u = arith.x, arith.u
    # lattice basis adapted to the knot curve: e1 = (p, q), e2 = (-x, -u), det = 1
    unit = Fraction(1, 64 * (p + q) * (p + q))
    ms = [floor(Fraction(2 * x * n + 1, 2 * p)) for n in range(p + 1)]
    lattice = [(m * p - n * x, m * q - n * u) for n, m in enumerate(ms)]
    # crossings sliding further along the knot curve sit further out in the door
    frac_order = sorted(range(p), key=lambda n: Fraction(2 * x * n + 1, 2 * p) % 1)
    rank = {n: k for k, n in enumerate(frac_order)}
    offsets = [unit * (1 + rank[n % p]) for n in range(p + 1)]
    doors = [
        (Fraction(L[0]) + e * p, Fraction(L[1]) + e * q) for L, e in zip(lattice, offsets)
    ]
    diag = BorderedDiagram(
        arith=arith,
        doors=doors,
        door_lattice=lattice,
        w_offset=unit * (p + 1),
        z_offset=unit / (16 * (p + q)),
    )
    diag.generators = _find_intersections(diag)
    if not beta_is_embedded(diag):
        raise AssertionError(f"synthesised beta for ({p},{q}) is not embedded")
    return diag


def _find_intersections(diag: BorderedDiagram) -> list:
    raw = []
    for n in range(diag.p):
        a, b = diag.door(n), diag.door(n + 1)
        for axis in (0, 1):  # axis 0: vertical lines x = k (alpha_1); axis 1: y = k
            lo, hi = sorted((a[axis], b[axis]))
            for k in range(floor(lo) + 1, floor(hi) + 1):
                if k == lo or k == hi:
                    raise AssertionError("beta vertex on an alpha line")
                t = (k - a[axis]) / (b[axis] - a[axis])
                pt = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
                arc = 1 if axis == 0 else 0
                raw.append((n + t, arc, pt))
    raw.sort(key=lambda r: r[0])
    gens = []
    counters = {0: 0, 1: 0}
    for s, arc, pt in raw:
        counters[arc] += 1
        prefix = "x" if arc == 0 else "y"
        gens.append(Intersection(f"{prefix}{counters[arc]}", arc, pt, s))
    return gens


def beta_is_embedded(diag: BorderedDiagram) -> bool:
    """The projection of one period of beta to the torus has no self-crossings."""
    segs = [(diag.door(n), diag.door(n + 1)) for n in range(diag.p)]
    for i, (a, b) in enumerate(segs):
        for j, (c, d) in enumerate(segs):
            for dx in range(-diag.p - 2, diag.p + 3):
                for dy in range(-2, 3):
                    if i == j and dx == 0 and dy == 0:
                        continue
                    c2 = (c[0] + dx, c[1] + dy)
                    d2 = (d[0] + dx, d[1] + dy)
                    if i != j or (dx, dy) != (0, 0):
                        # consecutive segments share a door vertex
                        if b == c2 or a == d2:
                            continue
                        if _segments_cross(a, b, c2, d2):
                            return False
    return True


# ---------------------------------------------------------------------------
# type A module


@dataclass(frozen=True)
class Operation:
    """m_{k+1}(source, rho_{I_1}, ..., rho_{I_k}) contains U^upower * target."""

    source: str
    chords: tuple
    target: str
    upower: int

    def __str__(self) -> str:
        chords = " ".join(f"rho{c}" for c in self.chords)
        return f"m {self.source} {chords} -> U^{self.upower} {self.target}".replace("  ", " ")


@dataclass
class TypeAModule:
    """Right A-infinity module over A(T^2) with F_2[U] coefficients."""

    idempotents: dict  # generator -> "i0" | "i1"
    operations: list  # [Operation], each with coefficient 1 (mod 2 already taken)
    caps: dict = field(default_factory=dict)
    # (source, chords) whose walk was cut at the chord cap / whose domains exceeded the w cap
    frontier: set = field(default_factory=set)
    overflow: set = field(default_factory=set)

    @property
    def generators(self) -> list:
        return sorted(self.idempotents)

    def index(self) -> dict:
        idx = defaultdict(list)
        for op in self.operations:
            idx[(op.source, op.chords)].append(op)
        return idx

    @property
    def chord_cap_saturated(self) -> bool:
        """Every operation found is strictly shorter than the chord cap.

        The walk explores all alpha paths up to the cap, so when nothing closes
        at the cap itself the longest operations were found with room to spare.
        """
        cap = self.caps.get("chordlen")
        if cap is None:
            return True
        longest = max((len(op.chords) for op in self.operations), default=0)
        return longest < cap

    def ops_from(self, source: str) -> list:
        return [op for op in self.operations if op.source == source]

    def has(self, source: str, chords: tuple, target: str, upower: int) -> bool:
        return Operation(source, tuple(chords), target, upower) in set(self.operations)

    def dump(self) -> str:
        return "\n".join(str(op) for op in sorted(self.operations, key=_op_key))


def _op_key(op: Operation):
    return (op.source, len(op.chords), op.chords, op.target, op.upower)


@dataclass
class _Domain:
    source: str
    target: str
    chords: tuple
    n_w: int
    polygon: list


class _Enumerator:
    def __init__(self, diag: BorderedDiagram, max_chords: int, max_w: int):
        self.diag = diag
        self.max_chords = max_chords
        self.max_w = max_w
        self.window = max_chords + max_w + 3
        self.z_eps = diag.z_offset
        self._door_cache: dict = {}
        self.frontier: set = set()
        self.overflow: set = set()
        # crossings of the fundamental lift of beta, keyed by alpha edge
        self.edge_points = defaultdict(list)
        for j in range(-self.window, self.window + 1):
            for g in diag.generators:
                pt = diag.point_at(g, j)
                s = g.s + diag.p * j
                self.edge_points[_edge_of(g.arc, pt)].append((pt, s, g.name))

    def beta_vertices(self, s_from: Fraction, s_to: Fraction) -> list:
        """Door vertices strictly between two parameters, in travel order, as floats."""
        if s_from < s_to:
            ks = range(floor(s_from) + 1, _ceil(s_to))
        else:
            ks = range(_ceil(s_from) - 1, floor(s_to), -1)
        return [self._door_float(k) for k in ks]

    def _door_float(self, k: int) -> tuple:
        pt = self._door_cache.get(k)
        if pt is None:
            d = self.diag.door(k)
            pt = self._door_cache[k] = (float(d[0]), float(d[1]))
        return pt

    def run(self) -> list:
        found = []
        for g in self.diag.generators:
            start = g.point
            for d in ((1, 0), (-1, 0)) if g.arc == 0 else ((0, 1), (0, -1)):
                self._walk(g, start, d, [start], [], found)
        return found

    def _walk(self, g, pos, d, verts, chords, found):
        half = Fraction(1, 2)
        probe = (pos[0] + half * d[0], pos[1] + half * d[1])
        if pos[0] != int(pos[0]) or pos[1] != int(pos[1]):
            probe = pos
        edge = _edge_of(0 if d[1] == 0 else 1, probe)
        for pt, s, name in self.edge_points.get(edge, ()):
            ahead = (pt[0] - pos[0]) * d[0] + (pt[1] - pos[1]) * d[1]
            if ahead > 0:
                dom = self._close(g, verts + [pt], tuple(chords), s, name)
                if dom is not None:
                    found.append(dom)
        if len(chords) >= self.max_chords:
            self.frontier.add((g.name, tuple(chords)))
            return
        hole = _next_lattice(pos, d)
        for chord, exit_dir in _CHORD_MOVES[d]:
            self._walk(g, hole, exit_dir, verts + [hole], chords + [chord], found)

    def _close(self, g, alpha_verts, chords, s_y, y_name):
        """Accept the loop alpha path + beta arc if it bounds an immersed polygon."""
        s_x = g.s
        if s_x == s_y:
            return None
        # floats are ample here: every feature is at least z_offset from the curves
        alpha_verts = [(float(a), float(b)) for a, b in alpha_verts]
        beta = self.beta_vertices(s_y, s_x)
        poly = alpha_verts + beta
        if len(poly) < 3:
            return None
        x_pt, y_pt = alpha_verts[0], alpha_verts[-1]
        if _cross(poly[-1], x_pt, alpha_verts[1]) <= 0:
            return None
        nxt_y = beta[0] if beta else x_pt
        if _cross(alpha_verts[-2], y_pt, nxt_y) <= 0:
            return None
        if _rotation_quarters(poly, len(alpha_verts)) != 4:
            return None
        chord_count = defaultdict(lambda: defaultdict(int))
        for k, hole in enumerate(alpha_verts[1:-1]):
            for quad in CHORD_QUADRANTS[chords[k]]:
                chord_count[hole][quad] += 1
        xs = [pt[0] for pt in poly]
        ys = [pt[1] for pt in poly]
        z_eps = float(self.z_eps)
        w_dx, w_dy = (float(c) for c in self.diag.w_point((0, 0)))
        lxs = np.arange(floor(min(xs)) - 1, floor(max(xs)) + 2, dtype=float)
        lys = np.arange(floor(min(ys)) - 1, floor(max(ys)) + 2, dtype=float)
        gx, gy = (a.ravel() for a in np.meshgrid(lxs, lys, indexing="ij"))
        want = np.zeros((len(gx), len(QUADRANTS)), dtype=int)
        index = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(gx, gy))}
        for hole, quads in chord_count.items():
            for q_idx, quad in enumerate(QUADRANTS):
                want[index[(int(hole[0]), int(hole[1]))], q_idx] = quads.get(quad, 0)
        probes = [
            np.stack([gx + sx * z_eps, gy + sy * z_eps], axis=1)
            for sx, sy in QUADRANTS.values()
        ]
        wind = _winding_many(poly, np.concatenate(probes))
        if not np.array_equal(wind.reshape(len(QUADRANTS), -1).T, want):
            return None
        mult = _winding_many(poly, np.stack([gx + w_dx, gy + w_dy], axis=1))
        if mult.min() < 0:
            return None
        n_w = int(mult.sum())
        if n_w > self.max_w:
            self.overflow.add((g.name, chords))
            return None
        side = np.array(list(self._beta_probes(beta, y_pt, x_pt)))
        if len(side) and _winding_many(poly, side).min() < 0:
            return None
        return _Domain(g.name, y_name, chords, n_w, poly)

    def _beta_probes(self, beta, start, end):
        """Points on both sides of every piece of the beta arc."""
        pts = [start] + beta + [end]
        eps = float(self.z_eps)
        for a, b in zip(pts, pts[1:]):
            cuts = [0.0, 1.0]
            dx, dy = b[0] - a[0], b[1] - a[1]
            for axis, delta in ((0, dx), (1, dy)):
                lo, hi = sorted((a[axis], b[axis]))
                for k in range(floor(lo) + 1, _ceil(hi)):
                    cuts.append((k - a[axis]) / delta)
            cuts.sort()
            norm = abs(dx) + abs(dy)
            nx, ny = -dy / norm * eps, dx / norm * eps
            for t0, t1 in zip(cuts, cuts[1:]):
                if t0 == t1:
                    continue
                t = (t0 + t1) / 2
                mx, my = a[0] + t * dx, a[1] + t * dy
                yield (mx + nx, my + ny)
                yield (mx - nx, my - ny)


def _winding_many(poly: list, pts: np.ndarray) -> np.ndarray:
    """Winding numbers of a closed polygon around each row of pts."""
    v = np.asarray(poly, dtype=float)
    x1, y1 = v[:, 0], v[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    px, py = pts[:, :1], pts[:, 1:]
    cross = (x2 - x1) * (py - y1) - (px - x1) * (y2 - y1)
    up = (y1 <= py) & (py < y2) & (cross > 0)
    down = (y2 <= py) & (py < y1) & (cross < 0)
    return up.sum(axis=1) - down.sum(axis=1)


def _rotation_quarters(poly: list, n_alpha: int) -> int:
    """Total turning of the boundary in quarter turns.

    Along the alpha path every vertex is a right-angle or straight move, so the
    count there is exact; along beta the turning is accumulated from angles.
    """
    from math import atan2, pi

    n = len(poly)
    total = 0.0
    for i in range(n):
        a, b, c = poly[i - 1], poly[i], poly[(i + 1) % n]
        u = (float(b[0] - a[0]), float(b[1] - a[1]))
        v = (float(c[0] - b[0]), float(c[1] - b[1]))
        total += atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1])
    return round(total / (pi / 2))


def _ceil(v: Fraction) -> int:
    return -floor(-v)


def _edge_of(arc: int, pt) -> tuple:
    if arc == 0:
        return ("h", floor(pt[0]), int(pt[1]))
    return ("v", int(pt[0]), floor(pt[1]))


def _next_lattice(pos, d) -> tuple:
    if d == EAST:
        return (floor(pos[0]) + 1, int(pos[1]))
    if d == WEST:
        return (_ceil(pos[0]) - 1, int(pos[1]))
    if d == NORTH:
        return (int(pos[0]), floor(pos[1]) + 1)
    return (int(pos[0]), _ceil(pos[1]) - 1)


DEFAULT_MAX_CHORDS = 8


def enumerate_cfa(
    diag: BorderedDiagram, max_chords: int = DEFAULT_MAX_CHORDS, max_w: int | None = None
) -> TypeAModule:
    """All operations coming from immersed polygons within the caps.

    The module remembers where the caps cut the search so that consumers can
    refuse inputs that would need operations beyond them.
    """
    if max_w is None:
        max_w = 3 * diag.periodic_w
    walker = _Enumerator(diag, max_chords, max_w)
    domains = walker.run()
    counts = defaultdict(int)
    for dom in domains:
        counts[(dom.source, dom.chords, dom.target, dom.n_w)] += 1
    ops = [Operation(s, c, t, w) for (s, c, t, w), k in counts.items() if k % 2]
    ops.sort(key=_op_key)
    idem = {g.name: g.idempotent for g in diag.generators}
    return TypeAModule(
        idem,
        ops,
        {"chordlen": max_chords, "wmult": max_w},
        frontier=walker.frontier,
        overflow=walker.overflow,
    )


# ---------------------------------------------------------------------------
# structure checks


def _factorisations(label: str):
    for cut in range(1, len(label)):
        a, b = label[:cut], label[cut:]
        if chord_product(a, b) == label:
            yield a, b


def ainf_violations(module: TypeAModule) -> list:
    """Inputs (x, chords, y, U-power) where the A-infinity relation fails.

    Only inputs that are fully inside the enumeration caps are examined, so
    truncation never produces false alarms.
    """
    cap_len = module.caps.get("chordlen")
    cap_w = module.caps.get("wmult")
    by_source = defaultdict(list)
    for op in module.operations:
        by_source[op.source].append(op)
    acc = defaultdict(int)
    # m(m(x, a_1..a_i), a_{i+1}..a_n)
    for op1 in module.operations:
        for op2 in by_source[op1.target]:
            acc[(op1.source, op1.chords + op2.chords, op2.target, op1.upower + op2.upower)] += 1
    # m(x, .., a_i a_{i+1}, ..): read backwards from the operation that sees the product
    for op in module.operations:
        for k, label in enumerate(op.chords):
            for a, b in _factorisations(label):
                seq = op.chords[:k] + (a, b) + op.chords[k + 1 :]
                acc[(op.source, seq, op.target, op.upower)] += 1
    bad = []
    for key, count in acc.items():
        _, seq, _, w = key
        if count % 2 == 0:
            continue
        if cap_len is not None and len(seq) > cap_len:
            continue
        if cap_w is not None and w > cap_w:
            continue
        bad.append(key)
    return sorted(bad)


# ---------------------------------------------------------------------------
# distinguished generators and relations


def _loop_ops(module: TypeAModule) -> list:
    return [
        op
        for op in module.operations
        if op.chords == ("3", "2")
        and op.source == op.target
        and module.idempotents[op.source] == "i0"
    ]


def distinguished_generators(diag: BorderedDiagram, module: TypeAModule | None = None) -> tuple:
    """(a, b1).

    a is the alpha_0 intersection carrying the loop m_3(a, rho_3, rho_2) = U^n a,
    b1 the alpha_1 intersection closest to the end of the arc where beta leaves
    the puncture.  With an enumerated module both are cross-checked against the
    operations: a must be the unique loop source and b1 the target of
    m_4(a, rho_3, rho_2, rho_1).
    """
    on_a1 = [g for g in diag.generators if g.arc == 1]
    b1 = min(on_a1, key=lambda g: g.point[1] % 1).name
    if module is None:
        module = enumerate_cfa(diag, max_chords=3, max_w=diag.p + 1)
    loops = _loop_ops(module)
    truncated = bool(module.overflow) or module.caps.get("chordlen", 3) < 3
    if len(loops) != 1:
        if truncated:
            raise EnumerationBudgetExceeded(f"caps {module.caps} cut off the rho_3 rho_2 loop")
        raise AssertionError(f"expected one rho_3 rho_2 loop on alpha_0, found {len(loops)}")
    a = loops[0].source
    m4 = [op for op in module.operations if op.source == a and op.chords == ("3", "2", "1")]
    if [op.target for op in m4] != [b1]:
        if truncated:
            raise EnumerationBudgetExceeded(f"caps {module.caps} cut off m_4(a, rho_3, rho_2, rho_1)")
        raise AssertionError(f"m_4(a, rho_3, rho_2, rho_1) does not hit {b1}: {m4}")
    return a, b1


def distinguished_relations(p: int, q: int) -> tuple:
    """m_3(a, rho_3, rho_2) = U^{n_w} a and m_4(a, rho_3, rho_2, rho_1) = U b1, in closed form."""
    arith = decompose_pq(p, q)
    return (
        Operation("a", ("3", "2"), "a", arith.n_w),
        Operation("a", ("3", "2", "1"), "b1", 1),
    )


def loop_upower(module: TypeAModule) -> int:
    loops = _loop_ops(module)
    if len(loops) != 1:
        raise AssertionError(f"expected one rho_3 rho_2 loop on alpha_0, found {len(loops)}")
    return loops[0].upower


def check_b1_property(module: TypeAModule, b1: str) -> bool:
    """Every operation with b1 as input or output carries a positive U-power."""
    return not b1_zero_ops(module, b1)


def b1_zero_ops(module: TypeAModule, b1: str) -> list:
    return [
        op for op in module.operations if b1 in (op.source, op.target) and op.upower == 0
    ]


def a_nonexistence_violations(module: TypeAModule, a: str) -> list:
    """Operations m_k(a, rho_123, ...) and U^0 operations m_k(c, ...) = a with c != a."""
    bad = [op for op in module.operations if op.source == a and op.chords[:1] == ("123",)]
    bad += [
        op
        for op in module.operations
        if op.target == a and op.source != a and op.upower == 0
    ]
    return bad


# ---------------------------------------------------------------------------
# gradings


class CFAGradingError(RuntimeError):
    pass


@dataclass
class GradedTypeA:
    module: TypeAModule
    gradings: dict  # generator -> ExtendedGrading, defined up to left powers of g
    g: ExtendedGrading
    base: str


def op_grading_step(op: Operation, source_gr: ExtendedGrading) -> ExtendedGrading:
    """lambda^(k-1) gr(x) gr(rho_I1) ... gr(rho_Ik) u^(-m)."""
    k = len(op.chords)
    parts = [lam(k - 1), source_gr]
    parts += [gr_of_chord(c) for c in op.chords]
    parts.append(upow(-op.upower))
    return gr_product(parts)


def left_period_exponent(diff: ExtendedGrading, g: ExtendedGrading) -> int | None:
    for v, gv in ((diff.i2, g.i2), (diff.j2, g.j2)):
        if gv:
            if v % gv:
                return None
            s = v // gv
            return s if gr_power(g, s) == diff else None
    return 0 if diff == IDENTITY else None


def grade_cfa(module: TypeAModule, base: str | None = None) -> GradedTypeA:
    """Propagate gradings from gr(a) = identity along every operation."""
    loops = _loop_ops(module)
    if len(loops) != 1:
        raise CFAGradingError("no unique rho_3 rho_2 loop to fix the period")
    loop = loops[0]
    base = loop.source if base is None else base
    g = gr_compose(upow(-loop.upower), gr_of_chord("23"))
    gr = {base: IDENTITY}
    touching = defaultdict(list)
    for op in module.operations:
        touching[op.source].append(op)
        touching[op.target].append(op)
    queue = [base]
    while queue:
        x = queue.pop()
        for op in touching[x]:
            if op.source == x and op.target not in gr:
                gr[op.target] = op_grading_step(op, gr[x])
                queue.append(op.target)
            elif op.target == x and op.source not in gr:
                # invert y = lambda^(k-1) x R u^-m for x
                fwd = op_grading_step(op, IDENTITY)
                gr[op.source] = gr_compose(gr[x], gr_invert(fwd))
                queue.append(op.source)
    for op in module.operations:
        want = op_grading_step(op, gr[op.source])
        diff = gr_compose(want, gr_invert(gr[op.target]))
        if left_period_exponent(diff, g) is None:
            raise CFAGradingError(f"{op}: gradings differ by {diff}, not a power of g")
    missing = [x for x in module.generators if x not in gr]
    if missing:
        raise CFAGradingError(f"generators not reached by any operation: {missing}")
    return GradedTypeA(module, gr, g, base)


# ---------------------------------------------------------------------------
# bundled pattern data


@dataclass
class PatternData:
    diagram: BorderedDiagram
    module: TypeAModule
    graded: GradedTypeA
    a: str
    b1: str

    @property
    def arith(self) -> PatternArithmetic:
        return self.diagram.arith


_PATTERN_CACHE: dict = {}


def pattern_data(p: int, q: int, max_chords: int = DEFAULT_MAX_CHORDS, max_w: int | None = None) -> PatternData:
    """Diagram, enumerated module, gradings and distinguished generators, memoised."""
    key = (p, q, max_chords, max_w)
    if key not in _PATTERN_CACHE:
        diag = build_diagram(p, q)
        module = enumerate_cfa(diag, max_chords=max_chords, max_w=max_w)
        _PATTERN_CACHE[key] = from_module(diag, module)
    return _PATTERN_CACHE[key]


def from_module(diag: BorderedDiagram, module: TypeAModule) -> PatternData:
    a, b1 = distinguished_generators(diag, module)
    return PatternData(diag, module, grade_cfa(module, base=a), a, b1)
