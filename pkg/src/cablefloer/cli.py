"""Command-line front end for cable computations.

Usage:
  cablefloer catalog list
  cablefloer validate catalog:trefoil_rh
  cablefloer cfd knot.cfk --framing 1
  cablefloer pattern 5 3 --cfa --svg h53.svg
  cablefloer cable catalog:unknot -p 3 -q 2 --hfk --euler
  cablefloer thinness catalog:trefoil_rh -p 3 -q 2 --framing 0 --report out/

Exit codes: 0 ok, 1 internal error, 2 domain error, 3 unsupported parameters.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from math import floor, gcd
from pathlib import Path

from . import __version__
from .cfd import build_cfd, check_typeD, grade_cfd, grading_json
from .cfk import (
    ComplexError,
    ModelComplex,
    catalog,
    catalog_get,
    emit_complex,
    epsilon,
    genus,
    mirror,
    parse_complex,
    tau,
    validate_complex,
)
from .pattern import (
    DEFAULT_MAX_CHORDS,
    BorderedDiagram,
    EnumerationBudgetExceeded,
    Operation,
    PatternParameterError,
    TypeAModule,
    build_diagram,
    decompose_pq,
    enumerate_cfa,
    from_module,
)
from .tensor import (
    TensorError,
    box_tensor,
    attach_gradings,
    cable_alexander,
    collapse_rank,
    euler_poly,
    hfk_hat,
    normalize_gradings,
)
from .thinness import NoWitnessError, UnsupportedParameters, reduce_parameters, thinness_verdict

EXIT_OK, EXIT_INTERNAL, EXIT_DOMAIN, EXIT_UNSUPPORTED = 0, 1, 2, 3


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# inputs


def load_complex(spec: str) -> tuple:
    """(ModelComplex, source bytes) from `catalog:NAME` or a `cfk v1` file."""
    if spec.startswith("catalog:"):
        name = spec.split(":", 1)[1]
        try:
            C = catalog_get(name)
        except KeyError as exc:
            raise DomainError(str(exc.args[0])) from None
        text = emit_complex(C)
    else:
        path = Path(spec)
        try:
            text = path.read_text()
        except OSError as exc:
            raise DomainError(f"cannot read {spec}: {exc.strerror}") from None
        C = parse_complex(text, name=path.stem)
    return C, text.encode()


def parse_caps(text: str | None) -> dict:
    caps = {"chordlen": DEFAULT_MAX_CHORDS, "wmult": None}
    if not text:
        return caps
    for item in text.split(","):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in caps or not val.strip().isdigit():
            raise DomainError(f"bad cap {item!r}; expected chordlen=N,wmult=N")
        caps[key] = int(val)
    return caps


def require_valid(C: ModelComplex) -> None:
    rep = validate_complex(C)
    if not rep.ok:
        raise DomainError(f"invalid complex {C.name}: " + "; ".join(rep.issues))


# ---------------------------------------------------------------------------
# cache


def cache_dir(override: str | None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get("CABLEFLOER_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "cablefloer"


def cache_key(*parts) -> str:
    h = hashlib.sha256()
    h.update(__version__.encode())
    for part in parts:
        h.update(b"\0")
        h.update(part if isinstance(part, bytes) else json.dumps(part, sort_keys=True).encode())
    return h.hexdigest()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def module_to_json(M: TypeAModule) -> dict:
    return {
        "idempotents": M.idempotents,
        "operations": [[op.source, list(op.chords), op.target, op.upower] for op in M.operations],
        "caps": M.caps,
        "frontier": sorted([s, list(c)] for s, c in M.frontier),
        "overflow": sorted([s, list(c)] for s, c in M.overflow),
    }


def module_from_json(data: dict) -> TypeAModule:
    return TypeAModule(
        dict(data["idempotents"]),
        [Operation(s, tuple(c), t, u) for s, c, t, u in data["operations"]],
        dict(data["caps"]),
        frontier={(s, tuple(c)) for s, c in data["frontier"]},
        overflow={(s, tuple(c)) for s, c in data["overflow"]},
    )


def cached_pattern(p: int, q: int, caps: dict, root: Path | None):
    """Enumerated pattern data, read from or written to the disk cache."""
    diag = build_diagram(p, q)
    if root is None:
        return from_module(diag, enumerate_cfa(diag, caps["chordlen"], caps["wmult"]))
    path = root / f"cfa-{cache_key('cfa', p, q, caps)}.json"
    if path.exists():
        module = module_from_json(json.loads(path.read_text()))
    else:
        module = enumerate_cfa(diag, caps["chordlen"], caps["wmult"])
        atomic_write(path, json.dumps(module_to_json(module), sort_keys=True))
    return from_module(diag, module)


# ---------------------------------------------------------------------------
# svg


def _fmt(v) -> str:
    return f"{float(v):.4f}".rstrip("0").rstrip(".")


def _beta_pieces(diag: BorderedDiagram) -> list:
    """One period of beta cut at the alpha lines, as plane segments."""
    pieces = []
    cuts = sorted(diag.generators, key=lambda g: g.s)
    for n in range(diag.p):
        pts = [diag.door(n)] + [g.point for g in cuts if n < g.s < n + 1] + [diag.door(n + 1)]
        pieces += list(zip(pts, pts[1:]))
    return pieces


def emit_svg(diag: BorderedDiagram, path: str | Path, window: tuple = (4, 3)) -> None:
    """Fundamental domain (left) and a window of the lift (right), byte-stable."""
    S, pad = 240, 20
    ww, wh = window
    L = S / max(ww, wh)
    width = pad * 3 + S + int(L * ww)
    height = pad * 2 + max(S, int(L * wh))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>H({diag.p},{diag.q})</title>",
        '<g font-family="monospace" font-size="9">',
    ]

    def torus_xy(pt):
        return pad + float(pt[0]) * S, pad + (1 - float(pt[1])) * S

    out.append(f'<rect x="{pad}" y="{pad}" width="{S}" height="{S}" fill="none" stroke="#999"/>')
    out.append(f'<line x1="{pad}" y1="{pad + S}" x2="{pad + S}" y2="{pad + S}" stroke="red" stroke-width="2"/>')
    out.append(f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{pad + S}" stroke="red" stroke-width="2"/>')
    for a, b in _beta_pieces(diag):
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        sx, sy = floor(mid[0]), floor(mid[1])
        x1, y1 = torus_xy((a[0] - sx, a[1] - sy))
        x2, y2 = torus_xy((b[0] - sx, b[1] - sy))
        out.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" stroke="blue"/>')
    for g in diag.generators:
        x, y = torus_xy((g.point[0] % 1, g.point[1] % 1))
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5"/>')
        dx, dy = (4, -4) if g.arc == 1 else (2, 12)
        out.append(f'<text x="{_fmt(x + dx)}" y="{_fmt(y + dy)}">{g.name}</text>')
    wx, wy = diag.w_point((0, 0))
    x, y = torus_xy((wx % 1, wy % 1))
    out.append(f'<text x="{_fmt(x)}" y="{_fmt(y)}" fill="green">w</text>')
    out.append(f'<text x="{pad + 4}" y="{pad + S - 4}" fill="green">z</text>')

    ox = pad * 2 + S

    def lift_xy(pt):
        return ox + float(pt[0]) * L, pad + (wh - float(pt[1])) * L

    for i in range(ww + 1):
        x, _ = lift_xy((i, 0))
        out.append(f'<line x1="{_fmt(x)}" y1="{pad}" x2="{_fmt(x)}" y2="{_fmt(pad + wh * L)}" stroke="red"/>')
    for j in range(wh + 1):
        _, y = lift_xy((0, j))
        out.append(f'<line x1="{ox}" y1="{_fmt(y)}" x2="{_fmt(ox + ww * L)}" y2="{_fmt(y)}" stroke="red"/>')
    out.append(f'<clipPath id="win"><rect x="{ox}" y="{pad}" width="{_fmt(ww * L)}" height="{_fmt(wh * L)}"/></clipPath>')
    out.append('<g clip-path="url(#win)" stroke="blue">')
    base = _beta_pieces(diag)
    for sx in range(-diag.p - 1, ww + 1):
        for sy in range(-diag.q - 1, wh + 2):
            for a, b in base:
                x1, y1 = lift_xy((a[0] + sx, a[1] + sy))
                x2, y2 = lift_xy((b[0] + sx, b[1] + sy))
                if max(x1, x2) < ox or min(x1, x2) > ox + ww * L:
                    continue
                if max(y1, y2) < pad or min(y1, y2) > pad + wh * L:
                    continue
                out.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}"/>')
    out.append("</g>")
    for i in range(ww + 1):
        for j in range(wh + 1):
            wx, wy = diag.w_point((i, j))
            x, y = lift_xy((wx, wy))
            if ox <= x <= ox + ww * L and pad <= y <= pad + wh * L:
                out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.5" fill="green"/>')
    out += ["</g>", "</svg>"]
    Path(path).write_text("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# figures


def render_hfk_figure(ranks: dict, title: str, path: Path) -> None:
    """Rank table in the (A, M) plane with the diagonals M - A = const."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for (A, M), r in sorted(ranks.items()):
        ax.scatter([A], [M], s=60 + 40 * r, color="C0")
        if r > 1:
            ax.annotate(str(r), (A, M), textcoords="offset points", xytext=(5, 5))
    deltas = sorted({M - A for (A, M) in ranks})
    if ranks:
        As = [A for A, _ in ranks]
        span = [min(As) - 1, max(As) + 1]
        for d in deltas:
            ax.plot(span, [a + d for a in span], lw=0.6, color="0.6")
    ax.set_xlabel("Alexander grading A")
    ax.set_ylabel("Maslov grading M")
    ax.set_title(f"{title}  (delta: {', '.join(map(str, deltas))})")
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def write_report(out_dir: str, stem: str, payload: dict, ranks: dict | None, title: str) -> list:
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    written = []
    if ranks is not None:
        fig_path = root / f"{stem}.png"
        render_hfk_figure(ranks, title, fig_path)
        payload = dict(payload, figure=fig_path.name)
        written.append(str(fig_path))
    json_path = root / f"{stem}.json"
    atomic_write(json_path, json.dumps(payload, indent=2) + "\n")
    written.append(str(json_path))
    return written


# ---------------------------------------------------------------------------
# subcommands


def _ranks_json(ranks: dict) -> list:
    return [{"A": A, "M": M, "rank": r} for (A, M), r in sorted(ranks.items())]


def cmd_catalog(args) -> dict:
    rows = []
    for name, C in catalog().items():
        rows.append(
            {
                "name": name,
                "generators": len(C.generators),
                "tau": tau(C),
                "epsilon": epsilon(C),
                "genus": genus(C),
            }
        )
    return {"catalog": rows, "parametric": ["torus(a,b)"]}


def cmd_validate(args) -> dict:
    C, _ = load_complex(args.input)
    rep = validate_complex(C)
    if not rep.ok:
        raise DomainError("; ".join(rep.issues))
    return {"complex": C.name, "valid": True, "generators": len(C.generators), "arrows": len(C.arrows)}


def cmd_cfd(args) -> dict:
    C, _ = load_complex(args.input)
    require_valid(C)
    D = build_cfd(C, args.framing)
    rep = check_typeD(D)
    if not rep.ok:
        raise RuntimeError("type D condition fails: " + "; ".join(rep.issues))
    GD = grade_cfd(D)
    return dict(D.to_json(GD.gradings), complex=C.name, h=grading_json(GD.h))


def _pattern_params(p: int, q: int) -> tuple:
    if p < 2 or gcd(p, q) != 1:
        raise DomainError(f"need coprime (p, q) with p >= 2, got ({p}, {q})")
    red = reduce_parameters(p, q)
    return red


def cmd_pattern(args) -> dict:
    red = _pattern_params(args.p, args.q)
    arith = decompose_pq(args.p, red.q0)
    out = {
        "p": args.p,
        "q": args.q,
        "reduced": {"q0": red.q0, "framing_shift": red.shift, "mirrored": red.mirrored},
        "x": arith.x,
        "y": arith.y,
        "u": arith.u,
        "v": arith.v,
        "vx": arith.vx,
        "n_w": arith.n_w,
    }
    diag = build_diagram(args.p, red.q0)
    out["generators"] = [{"name": g.name, "idempotent": g.idempotent} for g in diag.generators]
    if args.svg:
        emit_svg(diag, args.svg)
        out["svg"] = str(args.svg)
    if args.cfa:
        P = cached_pattern(args.p, red.q0, args.caps, args.cache_root)
        out["a"], out["b1"] = P.a, P.b1
        out["operations"] = [str(op) for op in P.module.operations]
        out["caps"] = P.module.caps
    return out


def _cable_setup(args):
    """Companion, pattern and framing for the cable K_{p, q + rp}, mirroring if q < 0."""
    C, raw = load_complex(args.input)
    require_valid(C)
    red = _pattern_params(args.p, args.q)
    r = args.framing + red.shift if not red.mirrored else -args.framing + red.shift
    if red.mirrored:
        C = mirror(C).with_name(f"mirror({C.name})")
    return C, raw, red, r


def cmd_cable(args) -> tuple:
    C, raw, red, r = _cable_setup(args)
    P = cached_pattern(args.p, red.q0, args.caps, args.cache_root)
    D = build_cfd(C, r)
    T = attach_gradings(box_tensor(P.module, D), P.graded, grade_cfd(D))
    canonical = hfk_hat(T)
    ranks, norm = normalize_gradings(T, canonical)
    if red.mirrored:
        ranks = {(-A, -M): k for (A, M), k in ranks.items()}
    out = {
        "companion": C.name,
        "p": args.p,
        "q": args.q,
        "framing": args.framing,
        "analysed": {"q0": red.q0, "framing": r, "mirrored": red.mirrored},
        "generators": len(T.generators),
        "arrows": len(T.arrows),
        "collapse_rank": sum(collapse_rank(T).values()),
        "total_rank": sum(ranks.values()),
        "deltas": sorted({M - A for (A, M) in ranks}),
    }
    if args.hfk:
        out["hfk"] = _ranks_json(ranks)
    if args.euler:
        from .cfk import euler_characteristic

        got = euler_poly(ranks)
        want = cable_alexander(euler_characteristic(C), args.p, red.q0 + r * args.p)
        out["euler"] = {"computed": str(got), "expected": str(want), "match": got == want}
    return out, ranks


def cmd_thinness(args) -> tuple:
    C, raw, red, r = _cable_setup(args)
    R = thinness_verdict(C, args.p, red.q0, r, max_chords=args.caps["chordlen"], max_w=args.caps["wmult"])
    out = R.to_json()
    out["input"] = {"p": args.p, "q": args.q, "framing": args.framing}
    return out, None


# ---------------------------------------------------------------------------
# entry point


def _text(payload: dict) -> str:
    lines = []
    for key, val in payload.items():
        if isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{key}:")
            lines += ["  " + "  ".join(f"{k}={v}" for k, v in item.items()) for item in val]
        elif isinstance(val, list):
            lines.append(f"{key}:")
            lines += [f"  {item}" for item in val]
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cablefloer", description="Bordered Floer computations for cables")
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--caps", default=None, help="enumeration caps, e.g. chordlen=8,wmult=9")
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--report", default=None, help="directory for a JSON report and figure")
    sub = ap.add_subparsers(dest="command", required=True)

    p_cat = sub.add_parser("catalog", parents=[common], help="list the built-in companions")
    p_cat.add_argument("action", choices=["list"])

    p_val = sub.add_parser("validate", parents=[common], help="check a complex")
    p_val.add_argument("input")

    p_cfd = sub.add_parser("cfd", parents=[common], help="type D module of the framed complement")
    p_cfd.add_argument("input")
    p_cfd.add_argument("--framing", type=int, default=0)

    p_pat = sub.add_parser("pattern", parents=[common], help="torus pattern diagram and type A module")
    p_pat.add_argument("p", type=int)
    p_pat.add_argument("q", type=int)
    p_pat.add_argument("--svg", default=None)
    p_pat.add_argument("--cfa", action="store_true")

    for name, helptext in (("cable", "knot Floer homology of a cable"), ("thinness", "witness pair")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("input")
        sp.add_argument("-p", type=int, required=True)
        sp.add_argument("-q", type=int, required=True)
        sp.add_argument("--framing", type=int, default=None)
        if name == "cable":
            sp.add_argument("--hfk", action="store_true")
            sp.add_argument("--euler", action="store_true")
    return ap


def run(argv: list | None = None) -> tuple:
    """(exit code, stdout text, stderr text)."""
    args = build_parser().parse_args(argv)
    try:
        args.caps = parse_caps(args.caps)
        args.cache_root = None if args.no_cache else cache_dir(args.cache_dir)
        if args.command in ("cable", "thinness"):
            if args.framing is None:
                if args.command == "cable":
                    args.framing = 0
                else:
                    C, _ = load_complex(args.input)
                    args.framing = 2 * tau(C) - 1
        payload, ranks = _dispatch(args)
        if args.report:
            stem = args.command if args.command in ("catalog", "pattern") else f"{args.command}-{Path(args.input).name.replace(':', '_')}"
            title = f"{args.command} {getattr(args, 'input', '')}".strip()
            if args.command == "thinness" and ranks is None:
                ranks = _thinness_ranks(args)
            written = write_report(args.report, stem, payload, ranks, title)
            payload = dict(payload, report=written)
        text = json.dumps(payload, indent=2) if args.format == "json" else _text(payload)
        return EXIT_OK, text + "\n", ""
    except (UnsupportedParameters, EnumerationBudgetExceeded) as exc:
        return EXIT_UNSUPPORTED, "", f"unsupported: {exc}\n"
    except (DomainError, ComplexError, PatternParameterError, NoWitnessError) as exc:
        return EXIT_DOMAIN, "", f"error: {type(exc).__name__}: {exc}\n"
    except (RuntimeError, TensorError, KeyError, AssertionError) as exc:
        return EXIT_INTERNAL, "", f"internal error: {type(exc).__name__}: {exc}\n"


def _thinness_ranks(args) -> dict:
    ns = argparse.Namespace(**vars(args))
    ns.hfk, ns.euler = True, False
    _, ranks = cmd_cable(ns)
    return ranks


def _dispatch(args) -> tuple:
    if args.command == "catalog":
        return cmd_catalog(args), None
    if args.command == "validate":
        return cmd_validate(args), None
    if args.command == "cfd":
        return cmd_cfd(args), None
    if args.command == "pattern":
        return cmd_pattern(args), None
    if args.command == "cable":
        return _cached_json(args, cmd_cable)
    return _cached_json(args, cmd_thinness)


def _cached_json(args, fn) -> tuple:
    """Run fn, reusing an earlier identical result from the disk cache."""
    if args.cache_root is None:
        return fn(args)
    _, raw = load_complex(args.input)
    flags = {k: getattr(args, k, None) for k in ("p", "q", "framing", "hfk", "euler")}
    key = cache_key(args.command, raw, flags, args.caps)
    path = args.cache_root / f"{args.command}-{key}.json"
    if path.exists():
        data = json.loads(path.read_text())
        ranks = {(A, M): r for A, M, r in data["ranks"]} if data["ranks"] is not None else None
        return data["payload"], ranks
    payload, ranks = fn(args)
    stored = {
        "payload": payload,
        "ranks": None if ranks is None else [[A, M, r] for (A, M), r in sorted(ranks.items())],
    }
    atomic_write(path, json.dumps(stored))
    return payload, ranks


def main(argv: list | None = None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
