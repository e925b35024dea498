"""Command-line front end.

Subcommands:
  moments     exact closed-form moment values
  verify      formula-vs-oracle certification (exhaustive enumeration)
  sample      interval-concentration sampling runs (--theorem t4|t5|isosceles)
  angles      right central angles from a fixed point to random vertices
  polytopes   K-polytope super-regularity
  pyramids    pyramids with a fixed apex over random bases
  visibility  self-visible K-polytope concentration near 1/sqrt(6)
  poles       north/east pole coefficient vectors and complex values
  render      SVG scenes (box_points | poles_circle | random_polytopes | pyramids)

Exit codes: 0 success/pass, 1 usage error, 2 guard violation,
3 acceptance-check failure.  A config file (`key = value` lines) supplies
flag defaults; flags win.  CYCLOBOX_SEED provides the default seed.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from . import concentration as con
from . import moments as mom
from . import render as ren
from . import reports as rep
from . import visibility as vis
from .core import (
    BoxSpec,
    CyclotomicInt,
    CycloboxError,
    GuardError,
    east_pole,
    embed_complex,
    euclidean_diameter,
    north_pole,
    north_pole_point,
)

EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_FAIL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_eps(text: str) -> Fraction:
    try:
        eps = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc
    if eps <= 0:
        raise argparse.ArgumentTypeError("eps must be positive")
    return eps


def _parse_alpha(spec: str, box: BoxSpec) -> CyclotomicInt:
    if spec == "origin":
        return CyclotomicInt.zero(box.p)
    if spec == "north-pole":
        return north_pole_point(box)
    coeffs = tuple(int(tok) for tok in spec.split(","))
    return CyclotomicInt(box.p, coeffs)


def _default_seed() -> int:
    env = os.environ.get("CYCLOBOX_SEED")
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            pass
    return 0


def _load_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _add_common(sub, *, sampling=True):
    sub.add_argument("--p", type=int, required=True, help="odd prime")
    sub.add_argument("--N", type=int, default=1, help="box half-width (default 1)")
    if sampling:
        sub.add_argument("--samples", type=int, default=10_000)
        sub.add_argument("--workers", type=int, default=1)
        sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", default=None, help="write the report file atomically")


def build_parser() -> _Parser:
    parser = _Parser(prog="cyclobox", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", default=None, help="key = value defaults file")
    subs = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = {}

    s = subs.add_parser("moments", help="exact moment values")
    _add_common(s, sampling=False)
    s.add_argument("--pairwise", action="store_true", help="vertex-to-vertex moments")
    s.add_argument("--alpha", default="origin")

    s = subs.add_parser("verify", help="formula-vs-oracle certification")
    _add_common(s, sampling=False)
    s.add_argument("--oracle", action="store_true", required=True)
    s.add_argument("--alpha", action="append", default=[],
                   help="extra alpha to certify (repeatable)")

    s = subs.add_parser("sample", help="distance concentration runs")
    _add_common(s)
    s.add_argument("--theorem", choices=("t4", "t5", "isosceles"), default="t5")
    s.add_argument("--eps", type=_parse_eps, default=None, help='rational "a/b"')
    s.add_argument("--eta", type=float, default=None, help="use eps ~ p^-eta")
    s.add_argument("--alpha", default="origin")
    s.add_argument("--exhaustive", action="store_true")

    s = subs.add_parser("angles", help="right central angles")
    _add_common(s)
    s.add_argument("--eps", type=_parse_eps, default=Fraction(1, 10),
                   help="|cos| threshold (rational)")
    s.add_argument("--alpha", default="north-pole")
    s.add_argument("--target", type=float, default=0.95)

    s = subs.add_parser("polytopes", help="K-polytope super-regularity")
    _add_common(s)
    s.add_argument("--K", type=int, default=3)
    s.add_argument("--T", type=float, default=None, help="edge tolerance 1/T")
    s.add_argument("--eta", type=float, default=None, help="use T = p^eta")

    s = subs.add_parser("pyramids", help="pyramids over random bases")
    _add_common(s)
    s.add_argument("--K", type=int, default=3)
    s.add_argument("--eps", type=_parse_eps, default=Fraction(1, 10))
    s.add_argument("--alpha", default="origin", help="apex (in the box)")

    s = subs.add_parser("visibility", help="self-visible polytope concentration")
    _add_common(s)
    s.add_argument("--K", type=int, default=3)
    s.add_argument("--eps", type=_parse_eps, default=Fraction(1, 20))
    s.add_argument("--max-attempts", type=int, default=64)

    s = subs.add_parser("poles", help="pole vectors and complex values")
    s.add_argument("--q", type=int, required=True, help="any modulus >= 3")
    s.add_argument("--N", type=int, default=1)

    s = subs.add_parser("render", help="SVG scenes")
    s.add_argument("--kind", choices=ren._KINDS, default="box_points")
    s.add_argument("--q", "--p", dest="q", type=int, required=True)
    s.add_argument("--N", type=int, default=1)
    s.add_argument("--K", type=int, default=3)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--budget", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--size", type=int, default=640)
    s.add_argument("--no-sampling", action="store_true",
                   help="fail instead of sampling when over budget")
    s.add_argument("--out", default=None)

    parser.subcommands = dict(subs.choices)
    return parser


def _emit(args, reports, failed: bool) -> int:
    text = rep.to_json(reports) if args.format == "json" else rep.to_csv(reports)
    if args.out:
        rep.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if failed else EXIT_OK


def _seed_of(args) -> int:
    return _default_seed() if args.seed is None else args.seed


def _cfg(args) -> con.SamplerConfig:
    cfg = con.SamplerConfig(_seed_of(args), args.samples, args.workers)
    if cfg.sample_count >= 20_000:
        print(
            f"cyclobox: sampling {cfg.sample_count} draws "
            f"(seed={cfg.seed}, workers={cfg.worker_count})...",
            file=sys.stderr,
        )
    return cfg


def _eps_of(args, p: int) -> Fraction:
    if getattr(args, "eps", None) is not None:
        return args.eps
    if getattr(args, "eta", None) is not None:
        return Fraction(p ** -args.eta).limit_denominator(10 ** 6)
    return Fraction(1, 2)


def _cmd_moments(args) -> int:
    box = BoxSpec(args.p, args.N)
    out = []
    if args.pairwise:
        a = mom.avg_vertex_pairs(box)
        l4 = mom.fourth_moment_vertex_pairs(box)
        m = mom.variance_vertex_pairs(box)
        print(f"A(V,V) = {a}")
        print(f"L(V,V) = {l4}")
        print(f"M(V,V) = {m}")
        out = [
            mom.MomentReport("avg_vertex_pairs", box.p, box.N, a),
            mom.MomentReport("fourth_vertex_pairs", box.p, box.N, l4),
            mom.MomentReport("variance_vertex_pairs", box.p, box.N, m),
        ]
    else:
        alpha = _parse_alpha(args.alpha, box)
        a = mom.avg_point_to_vertices(alpha, box)
        m = mom.second_moment_point_to_vertices(alpha, box)
        print(f"A(alpha,V) = {a}")
        print(f"M(alpha,V) = {m}")
        out = [
            mom.MomentReport("avg_point_vertices", box.p, box.N, a, None, alpha.coeffs),
            mom.MomentReport("second_moment_point_vertices", box.p, box.N, m, None, alpha.coeffs),
        ]
    if args.out:
        return _emit(args, out, failed=False)
    return EXIT_OK


def _cmd_verify(args) -> int:
    box = BoxSpec(args.p, args.N)
    alphas = [CyclotomicInt.zero(box.p), north_pole_point(box)]
    alphas += [_parse_alpha(spec, box) for spec in args.alpha]
    reports = list(mom.oracle_moments(box))
    for alpha in alphas:
        reports += mom.oracle_moments(box, alpha)
    checks = [mom.oracle_cancellation_sums(alpha, box) for alpha in alphas]
    ok = True
    for r in reports:
        status = "EXACT-EQUAL" if r.exact_equal else "MISMATCH"
        ok &= r.exact_equal
        print(f"{status} {r.kind} p={r.p} N={r.N} value={r.formula_value}")
    for c in checks:
        status = "EXACT-EQUAL" if c.all_match else "MISMATCH"
        ok &= c.all_match
        print(f"{status} cancellation_sums p={c.p} N={c.N} alpha=({','.join(map(str, c.alpha))})")
    if args.out:
        return _emit(args, reports + checks, failed=not ok)
    return EXIT_OK if ok else EXIT_FAIL


def _summary(r) -> str:
    verdict = "vacuous" if r.vacuous else ("pass" if r.passed else "FAIL")
    bound = "n/a" if r.bound is None else f"{r.bound:.6f}"
    return (f"{r.theorem} p={r.p} N={r.N} trials={r.trials} "
            f"proportion={r.empirical_proportion:.6f} bound={bound} verdict={verdict}")


def _cmd_sample(args) -> int:
    box = BoxSpec(args.p, args.N)
    eps = _eps_of(args, box.p)
    cfg = _cfg(args)
    t0 = time.perf_counter()
    if args.theorem == "t5":
        r = con.vertex_pair_report(box, eps, cfg, exhaustive=args.exhaustive)
    else:
        alpha = _parse_alpha(args.alpha, box)
        if args.theorem == "t4":
            r = con.theorem4_report(alpha, box, eps, cfg, exhaustive=args.exhaustive)
        else:
            r = con.isosceles_report(alpha, box, eps, cfg)
    print(f"{_summary(r)} ({time.perf_counter() - t0:.2f}s)")
    return _emit(args, r, failed=not r.passed)


def _cmd_angles(args) -> int:
    box = BoxSpec(args.p, args.N)
    alpha = _parse_alpha(args.alpha, box)
    r = con.right_angle_report(alpha, box, float(args.eps), _cfg(args), target=args.target)
    print(_summary(r) + f" median|cos|={r.extra['median_abs_cos']:.6f}")
    return _emit(args, r, failed=not r.passed)


def _cmd_polytopes(args) -> int:
    box = BoxSpec(args.p, args.N)
    t_val = args.T
    if t_val is None:
        t_val = box.p ** args.eta if args.eta is not None else 2.0
    r = con.polytope_report(box, args.K, t_val, _cfg(args))
    print(_summary(r))
    return _emit(args, r, failed=not r.passed)


def _cmd_pyramids(args) -> int:
    box = BoxSpec(args.p, args.N)
    apex = _parse_alpha(args.alpha, box)
    r = con.pyramid_report(apex, box, args.K, args.eps, _cfg(args))
    print(_summary(r))
    return _emit(args, r, failed=not r.passed)


def _cmd_visibility(args) -> int:
    box = BoxSpec(args.p, args.N)
    r = vis.visibility_concentration_report(
        box, args.K, float(args.eps), _cfg(args), max_attempts=args.max_attempts
    )
    warn = " (N/p below 10: asymptotic regime not reached)" if r.np_ratio_warning else ""
    print(
        f"visibility p={r.p} N={r.N} K={r.K} proportion={r.proportion_near_center:.6f} "
        f"target={r.target:.6f} visible_fraction={r.visible_fraction:.6f} "
        f"verdict={'pass' if r.passed else 'FAIL'}{warn}"
    )
    return _emit(args, r, failed=not r.passed)


def _cmd_poles(args) -> int:
    q, n_box = args.q, args.N
    np_c = north_pole(q, n_box)
    ep_c = east_pole(q, n_box)
    z_np = embed_complex(np_c, q)
    z_ep = embed_complex(ep_c, q)
    print(f"NP({q}) coeffs = ({', '.join(map(str, np_c))})")
    print(f"NP({q}) value  = {z_np.real:.9f}{z_np.imag:+.9f}i")
    print(f"EP({q}) coeffs = ({', '.join(map(str, ep_c))})")
    print(f"EP({q}) value  = {z_ep.real:.9f}{z_ep.imag:+.9f}i")
    if q % 2 == 1:
        print(f"euclidean_diameter = {euclidean_diameter(q, n_box):.7f}")
    return EXIT_OK


def _cmd_render(args) -> int:
    scene = ren.SceneSpec(
        kind=args.kind,
        q=args.q,
        N=args.N,
        K=args.K,
        count=args.count,
        budget=args.budget,
        seed=_seed_of(args),
        allow_sampling=not args.no_sampling,
        size=args.size,
    )
    svg = ren.render_scene(scene)
    if args.out:
        rep.write_atomic(args.out, svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


_COMMANDS = {
    "moments": _cmd_moments,
    "verify": _cmd_verify,
    "sample": _cmd_sample,
    "angles": _cmd_angles,
    "polytopes": _cmd_polytopes,
    "pyramids": _cmd_pyramids,
    "visibility": _cmd_visibility,
    "poles": _cmd_poles,
    "render": _cmd_render,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)

    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)

    parser = build_parser()
    if known.config:
        try:
            defaults = _load_config(known.config)
        except (OSError, ValueError) as exc:
            print(f"cyclobox: config error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for sub in parser.subcommands.values():
            typed = {}
            for action in sub._actions:
                if action.dest in defaults:
                    raw = defaults[action.dest]
                    typed[action.dest] = action.type(raw) if action.type else raw
            sub.set_defaults(**typed)

    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except GuardError as exc:
        print(f"cyclobox: guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (CycloboxError, ValueError) as exc:
        print(f"cyclobox: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
