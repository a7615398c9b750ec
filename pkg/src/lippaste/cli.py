"""Command-line front end.

Reports go to stdout as JSON (CSV for sweeps), one-line summaries to stderr.
Exit codes: 0 success, 1 mathematical violation / false verdict, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import geometry
from .lipschitz import MappedFunction, disjoint_bound_check, pasting_bound_check
from .locality import Cover, ball_cover, global_bound_from_cover
from .metricspace import (
    TAU_METRIC,
    FiniteMetricSpace,
    InputError,
    SubsetPair,
    load_json,
    load_pair,
    load_space,
    random_metric,
    restrict,
    verify_metric,
)
from .pasting import GlueError, glued_metric, lp_constant

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    out: Optional[str] = None
    tol: float = TAU_METRIC
    seed: int = 0
    fmt: str = "json"


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _json_only(cfg: RunConfig) -> None:
    if cfg.fmt != "json":
        raise InputError(f"{cfg.subcommand} only supports --format json")


def cmd_check_metric(args, cfg: RunConfig) -> int:
    _json_only(cfg)
    space = load_space(args.space)
    viol = verify_metric(space, cfg.tol)
    _emit(_dump({"n": space.n, "violations": [v.to_json() for v in viol]}), cfg)
    _note(f"check-metric: n={space.n}, {len(viol)} violation(s)")
    return EXIT_VIOLATION if viol else EXIT_OK


def cmd_lp(args, cfg: RunConfig) -> int:
    _json_only(cfg)
    space, pair = load_space(args.space), load_pair(args.pair)
    rep = lp_constant(space, pair)
    _emit(_dump(rep.to_json()), cfg)
    if rep.disjoint:
        _note(f"lp: disjoint, separation={rep.separation!r}")
    else:
        _note(f"lp: k={rep.k!r}")
    return EXIT_OK


def cmd_glue(args, cfg: RunConfig) -> int:
    _json_only(cfg)
    space, pair = load_space(args.space), load_pair(args.pair)
    try:
        glued = glued_metric(space, pair, cfg.tol)
    except GlueError as exc:
        _emit(_dump({"violations": [v.to_json() for v in exc.violations]}), cfg)
        _note("glue: glued matrix failed the metric check")
        return EXIT_VIOLATION
    doc = glued.as_space().to_json()
    doc["pair"] = glued.pair.to_json()
    _emit(_dump(doc), cfg)
    _note(f"glue: n={glued.base.n}")
    return EXIT_OK


def _space_ref(ref, base: Path) -> Optional[FiniteMetricSpace]:
    if ref is None:
        return None
    if isinstance(ref, str):
        return load_space(base / ref)
    return FiniteMetricSpace.from_json(ref)


def cmd_verify(args, cfg: RunConfig) -> int:
    _json_only(cfg)
    space, pair = load_space(args.space), load_pair(args.pair)
    pair.validate(space.n)
    sub = restrict(space, pair.union)
    local = pair.reindexed(pair.union)
    doc = load_json(args.function)
    if not isinstance(doc, dict):
        raise InputError("function document must be an object")
    base = Path(args.function).parent
    domain = _space_ref(doc.get("domain"), base)
    if domain is not None and domain != sub:
        raise InputError("function domain differs from the space restricted to A ∪ B")
    codomain = _space_ref(doc.get("codomain"), base)
    if codomain is None:
        raise InputError("function document needs a 'codomain'")
    f = MappedFunction.from_json(doc, domain=sub, codomain=codomain)
    if local.disjoint:
        rep = disjoint_bound_check(f, local, cfg.tol)
    else:
        rep = pasting_bound_check(f, local, lp_constant(sub, local), cfg.tol)
    _emit(_dump(rep.to_json()), cfg)
    _note(f"verify: Lip f={rep.lip_f!r} bound={rep.bound!r} verdict={rep.verdict}")
    return EXIT_OK if rep.verdict else EXIT_VIOLATION


def cmd_local(args, cfg: RunConfig) -> int:
    _json_only(cfg)
    space, pair = load_space(args.space), load_pair(args.pair)
    if (args.cover is None) == (args.radius is None):
        raise InputError("give exactly one of a cover file or --radius")
    if args.cover is not None:
        cover = Cover.from_json(load_json(args.cover))
    else:
        cover = ball_cover(space, pair, args.radius)
    try:
        rep = global_bound_from_cover(space, pair, cover)
    except AssertionError as exc:
        _note(f"local: {exc}")
        return EXIT_VIOLATION
    doc = rep.to_json()
    doc["cover"] = cover.to_json()
    _emit(_dump(doc), cfg)
    _note(f"local: direct k={rep.direct_k!r} <= bound {rep.global_bound!r}")
    return EXIT_OK


def _parse_chart(text: Optional[str]) -> Optional[geometry.LinearChart]:
    if text is None:
        return None
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise InputError(f"--chart expects du,dv,dw integers, got {text!r}") from None
    if len(parts) not in (2, 3):
        raise InputError("--chart expects du,dv[,dw]")
    return geometry.LinearChart(*parts)


def _require(value, flag: str, family: str):
    if value is None:
        raise InputError(f"{family} needs {flag}")
    return value


def cmd_sample(args, cfg: RunConfig) -> int:
    _json_only(cfg)
    fam = args.family
    if fam == "random":
        n = _require(args.n, "--n", fam)
        space = random_metric(n, cfg.seed)
        rng = np.random.default_rng(cfg.seed)
        a, b = _random_overlapping_pair(rng, n)
        doc = {"point_cloud": None, "space": space.to_json(), "pair": SubsetPair(a, b).to_json()}
    else:
        if fam == "tangential_parabola":
            sample = geometry.tangential_parabola_points(
                _require(args.n, "--n", fam), _require(args.t_min, "--t-min", fam))
        elif fam == "transverse_lines":
            sample = geometry.transverse_lines_points(_require(args.n, "--n", fam))
        elif fam == "great_circles":
            sample = geometry.great_circles_points(
                _require(args.n, "--n", fam), _require(args.angle, "--angle", fam))
        else:
            sample = geometry.linear_transverse_points(
                _require(_parse_chart(args.chart), "--chart", fam),
                _require(args.grid, "--grid", fam))
        space, pair = sample.to_metric()
        doc = {"point_cloud": sample.to_json(), "space": space.to_json(), "pair": pair.to_json()}
    _emit(_dump(doc), cfg)
    _note(f"sample: {fam}, n={len(doc['space']['labels'])}")
    return EXIT_OK


def _random_overlapping_pair(rng, n: int):
    """Random A, B over ``range(n)`` sharing at least one index."""
    perm = rng.permutation(n)
    shared = perm[: rng.integers(1, max(2, n // 3) + 1)]
    rest = perm[len(shared):]
    side = rng.integers(0, 3, size=len(rest))
    a = sorted(set(shared.tolist()) | set(rest[side != 1].tolist()))
    b = sorted(set(shared.tolist()) | set(rest[side != 0].tolist()))
    return a, b


def cmd_sweep(args, cfg: RunConfig) -> int:
    if args.h:
        hs = args.h
    else:
        hs = [args.h0 / 2**i for i in range(args.halvings)]
    angle = args.angle
    if args.family == "great_circles":
        _require(angle, "--angle", args.family)
    chart = _parse_chart(args.chart)
    recs = geometry.density_sweep(args.family, hs, angle=angle, chart=chart)
    if cfg.fmt == "csv":
        text = geometry.sweep_csv(recs)
    else:
        text = _dump([r.__dict__ for r in recs])
    _emit(text, cfg)
    _note(f"sweep: {args.family}, {len(recs)} record(s), final k={recs[-1].k!r}")
    return EXIT_OK


_ANGLE = re.compile(r"^\s*(?:(?P<num>[0-9.]+)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>[0-9.]+))?\s*$")


def _angle(text: str) -> float:
    """Radians as a number, or ``pi``, ``pi/6``, ``2*pi/3`` style."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text.lower())
    if not m:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}")
    try:
        num = float(m["num"]) if m["num"] else 1.0
        den = float(m["den"]) if m["den"] else 1.0
        return num * math.pi / den
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=TAU_METRIC,
                        help="relative tolerance (default %(default)s)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (sweep defaults to csv, others json)")

    p = argparse.ArgumentParser(prog="lippaste", description="Lipschitz pasting toolkit for finite metric spaces.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("check-metric", parents=[common], help="check the metric axioms")
    s.add_argument("space")
    s.set_defaults(func=cmd_check_metric)

    s = sub.add_parser("lp", parents=[common], help="optimal LP constant of a pair")
    s.add_argument("space")
    s.add_argument("pair")
    s.set_defaults(func=cmd_lp)

    s = sub.add_parser("glue", parents=[common], help="glued metric on A ∪ B")
    s.add_argument("space")
    s.add_argument("pair")
    s.set_defaults(func=cmd_glue)

    s = sub.add_parser("verify", parents=[common], help="check the pasting bound for a function")
    s.add_argument("space")
    s.add_argument("pair")
    s.add_argument("function")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("local", parents=[common], help="cover-based bound on the LP constant")
    s.add_argument("space")
    s.add_argument("pair")
    s.add_argument("cover", nargs="?")
    s.add_argument("--radius", type=float, help="use a ball cover instead of a cover file")
    s.set_defaults(func=cmd_local)

    families = ["tangential_parabola", "transverse_lines", "great_circles", "linear"]
    s = sub.add_parser("sample", parents=[common], help="emit a sampled space and pair")
    s.add_argument("family", choices=families + ["random"])
    s.add_argument("--n", type=int, help="points per curve/line/circle, or space size for random")
    s.add_argument("--t-min", type=float, dest="t_min")
    s.add_argument("--angle", type=_angle)
    s.add_argument("--chart", help="du,dv,dw")
    s.add_argument("--grid", type=int)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("sweep", parents=[common], help="LP constant under refinement")
    s.add_argument("family", choices=families)
    s.add_argument("--h", type=float, nargs="+", help="explicit decreasing h values")
    s.add_argument("--h0", type=float, default=0.125, help="first h when halving (default 1/8)")
    s.add_argument("--halvings", type=int, default=8, help="number of h values (default 8)")
    s.add_argument("--angle", type=_angle)
    s.add_argument("--chart", help="du,dv,dw")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or ("csv" if args.subcommand == "sweep" else "json")
    inputs = [getattr(args, k, None) for k in ("space", "pair", "function", "cover")]
    cfg = RunConfig(args.subcommand, [p for p in inputs if p], args.out, args.tol, args.seed, fmt)
    try:
        return args.func(args, cfg)
    except InputError as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
