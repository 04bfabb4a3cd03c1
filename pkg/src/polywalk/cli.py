"""Command-line front end.

Subcommands map one-to-one onto the library: construct-walk, check-fleeing,
preserves, walk-apply, magyar, bogolubov, weyl, ergodic-avg, correlate, gen.
Exit codes: 0 on success (all targets found), 2 when a search exhausted its
range or hit an indeterminate decision, 1 for usage or validation errors.

Walks are named by compact specs:

    xyP:<P expr>:<1|2>        shear walk for x*y - P(z)
    bogolubov:<P expr>        the x - P(y) walk
    unipotent:<ints>          gamma^n for a row-major unipotent matrix
    adjoint:<ints>            unipotent walk of Ad(g) for row-major g
    signature:<p>,<q>:<i>     i-th generator walk of the (p, q) form family
    identity:<d>              identity walk on Z^d
    file:<path>               walk record in the text serialization
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from math import isqrt
from pathlib import Path

from .config import Config, ConfigError
from .ergodic import (
    BoxIndicator,
    TorusSystem,
    TrigPoly,
    choose_k,
    correlation_average,
    empirical_average,
)
from .fleeing import (
    BaseExhausted,
    DepthExhausted,
    construct_fleeing_walk,
    is_fleeing,
)
from .generators import (
    NotUnipotent,
    adjoint_action_matrix,
    bogolubov_walk,
    mat,
    signature_form_walks,
    unipotent_walk,
    xy_minus_P_walks,
)
from .lab import (
    BohrSet,
    WindowSet,
    bogolubov_experiment,
    magyar_experiment,
    weyl_sum,
    weyl_sum_rational,
)
from .poly import MPoly, PolySyntaxError, PolyVector, poly_parse, poly_parse_auto
from .reals import DEFAULT_PRECISION, Real, parse_real
from .walks import Walk, identity_walk, preserves


class UsageError(ValueError):
    pass


def parse_walk_spec(spec: str) -> Walk:
    kind, _, rest = spec.partition(":")
    if kind == "xyP":
        expr, _, index = rest.rpartition(":")
        if index not in ("1", "2"):
            raise UsageError(f"xyP walk index must be 1 or 2, got {index!r}")
        pair = xy_minus_P_walks(poly_parse_auto(expr))
        return pair[int(index) - 1]
    if kind == "bogolubov":
        return bogolubov_walk(poly_parse_auto(rest))
    if kind in ("unipotent", "adjoint"):
        numbers = [int(x) for x in rest.replace(",", " ").split()]
        n = isqrt(len(numbers))
        if n * n != len(numbers):
            raise UsageError(f"{len(numbers)} entries do not form a square matrix")
        rows = mat([numbers[i * n:(i + 1) * n] for i in range(n)])
        if kind == "adjoint":
            return unipotent_walk(adjoint_action_matrix(rows))
        return unipotent_walk(rows)
    if kind == "signature":
        params, _, index = rest.rpartition(":")
        p, q = (int(x) for x in params.split(","))
        family = signature_form_walks(p, q)
        walks = family.walks
        i = int(index)
        if not (1 <= i <= len(walks)):
            raise UsageError(f"signature family ({p},{q}) has {len(walks)} walks")
        return walks[i - 1]
    if kind == "identity":
        return identity_walk(int(rest))
    if kind == "file":
        return Walk.from_text(Path(rest).read_text(encoding="utf-8"))
    raise UsageError(f"unknown walk spec kind {kind!r}")


def parse_int_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"bad integer vector {text!r}")


def _emit(text: str, out_path: str | None):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if out_path:
        Path(out_path).write_text(text if text.endswith("\n") else text + "\n",
                                  encoding="utf-8")


def _write_csv(report, csv_path: str | None):
    if csv_path:
        Path(csv_path).write_text(report.to_csv(), encoding="utf-8")


# -- oracle / system construction from config ---------------------------------

_ORACLE_KEYS = {"model", "dim", "torus_dim", "side", "density", "points", "precision"}
_ORACLE_PREFIXES = ("freq_", "radius_", "center_")


def build_oracle(cfg: Config, seed: int):
    model = cfg.get_str("model")
    dim = cfg.get_int("dim")
    if model == "window":
        side = cfg.get_int("side")
        if cfg.has("points"):
            points = [parse_int_vector(p) for p in cfg.get_str("points").split(";")]
            return WindowSet(dim, side, points)
        density = cfg.get_float("density")
        return WindowSet.random(dim, side, density, seed)
    if model == "bohr":
        freq_rows = [
            [parse_real(x) for x in row.split(",")] for row in cfg.indexed("freq_")
        ]
        radii = [Fraction(r) for r in cfg.indexed("radius_")]
        centers_raw = cfg.indexed("center_")
        centers = [parse_real(c) for c in centers_raw] if centers_raw else None
        precision = cfg.get_int("precision", DEFAULT_PRECISION)
        return BohrSet(dim, freq_rows, radii, centers, precision)
    raise ConfigError(f"unknown set model {model!r} (expected window or bohr)")


def build_system(cfg: Config) -> TorusSystem:
    rows = [[parse_real(x) for x in row.split(",")] for row in cfg.indexed("row_")]
    if not rows:
        raise ConfigError("no action matrix rows (row_1 = ... missing)")
    base = [parse_real(x) for x in cfg.get_str("x0", "0").split(",")]
    if len(base) == 1 and len(rows) > 1:
        base = base * len(rows)
    precision = cfg.get_int("precision", 40)
    return TorusSystem(rows, base, precision)


def build_trig(cfg: Config) -> TrigPoly:
    comps = []
    for raw in cfg.indexed("comp_"):
        try:
            freq_part, re_part, im_part = (x.strip() for x in raw.split(":"))
            freq = parse_int_vector(freq_part)
            comps.append((freq, complex(float(re_part), float(im_part))))
        except ValueError:
            raise ConfigError(
                f"bad component {raw!r} (expected 'm1 m2 : re : im')"
            )
    if not comps:
        raise ConfigError("no observable components (comp_1 = ... missing)")
    return TrigPoly.of(comps)


def build_box(cfg: Config) -> BoxIndicator:
    centers = [parse_real(c) for c in cfg.indexed("center_")]
    radii = [Fraction(r) for r in cfg.indexed("radius_")]
    if not radii:
        raise ConfigError("no box arcs (radius_1 = ... missing)")
    if not centers:
        centers = [Real(0)] * len(radii)
    return BoxIndicator.of(centers, radii)


def parse_poly_vector(text: str, var: str = "n") -> PolyVector:
    return PolyVector([poly_parse(piece.strip(), (var,))
                       for piece in text.split(",")])


def _load_config(args, allowed: set[str], prefixes=()) -> Config:
    cfg = Config.from_path(args.config) if args.config else Config({})
    for flag, key in (("N_max", "N_max"), ("seed", "seed"), ("jobs", "jobs"),
                      ("precision", "precision")):
        if getattr(args, flag, None) is not None:
            cfg.override(key, getattr(args, flag))
    cfg.require_known(allowed, prefixes)
    return cfg


# -- subcommand handlers --------------------------------------------------------

def cmd_check_fleeing(args) -> int:
    polys = parse_poly_vector(args.poly, args.var)
    if args.validate_only:
        print("ok")
        return 0
    answer = is_fleeing(polys)
    print(f"fleeing: {'true' if answer else 'false'}")
    return 0


def cmd_preserves(args) -> int:
    walk = parse_walk_spec(args.walk_from)
    form = poly_parse(args.form, walk.coords)
    if args.validate_only:
        print("ok")
        return 0
    answer = preserves(form, walk)
    print(f"preserved: {'true' if answer else 'false'}")
    return 0


def cmd_walk_apply(args) -> int:
    walk = parse_walk_spec(args.walk_from)
    v = parse_int_vector(args.v)
    if args.n < 0:
        raise UsageError("n must be non-negative")
    if args.validate_only:
        print("ok")
        return 0
    image = walk.apply(args.n, v)
    print(" ".join(str(x) for x in image))
    return 0


def cmd_construct_walk(args) -> int:
    gens = [parse_walk_spec(spec) for spec in args.gen]
    v = parse_int_vector(args.v)
    if args.validate_only:
        print("ok")
        return 0
    try:
        cert = construct_fleeing_walk(gens, v, args.N_max, args.R_max)
    except (DepthExhausted, BaseExhausted) as exc:
        print(f"construction failed: {exc}")
        return 2
    _emit(cert.to_text(), args.out)
    return 0


def cmd_gen(args) -> int:
    if args.family in ("xyP", "bogolubov") and not args.P:
        raise UsageError(f"--P is required for the {args.family} family")
    if args.family == "signature" and (args.p is None or args.q is None):
        raise UsageError("--p and --q are required for the signature family")
    if args.family == "adjoint" and not args.matrix:
        raise UsageError("--matrix is required for the adjoint family")
    if args.validate_only:
        print("ok")
        return 0
    if args.family == "xyP":
        s1, s2 = xy_minus_P_walks(poly_parse_auto(args.P))
        _emit(s1.to_text() + "\n" + s2.to_text(), args.out)
        return 0
    if args.family == "bogolubov":
        _emit(bogolubov_walk(poly_parse_auto(args.P)).to_text(), args.out)
        return 0
    if args.family == "signature":
        family = signature_form_walks(args.p, args.q)
        lines = [f"form {family.form}"]
        for m, walk in zip(family.matrices, family.walks):
            flat = ",".join(str(x) for row in m for x in row)
            lines.append(f"matrix {flat}")
            lines.append(walk.to_text().rstrip("\n"))
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    if args.family == "adjoint":
        numbers = parse_int_vector(args.matrix)
        n = isqrt(len(numbers))
        if n * n != len(numbers):
            raise UsageError("matrix entries do not form a square")
        g = mat([list(numbers[i * n:(i + 1) * n]) for i in range(n)])
        ad = adjoint_action_matrix(g)
        flat = ",".join(str(x) for row in ad for x in row)
        lines = [f"matrix {flat}", unipotent_walk(ad).to_text().rstrip("\n")]
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    raise UsageError(f"unknown family {args.family!r}")


_EXPERIMENT_KEYS = _ORACLE_KEYS | {"experiment", "P", "k", "targets", "N_max",
                                   "seed", "jobs"}


def _run_experiment(args, runner) -> int:
    cfg = _load_config(args, _EXPERIMENT_KEYS, _ORACLE_PREFIXES)
    if args.P is not None:
        cfg.override("P", args.P)
    if args.targets is not None:
        cfg.override("targets", args.targets)
    if args.k is not None:
        cfg.override("k", args.k)
    seed = cfg.get_int("seed", 0)
    p = poly_parse_auto(cfg.get_str("P"))
    k = cfg.get_int("k", 1)
    targets = cfg.get_int_list("targets")
    n_max = cfg.get_int("N_max", 100000)
    jobs = cfg.get_int("jobs", 1)
    oracle = build_oracle(cfg, seed)
    if args.validate_only:
        print("ok")
        return 0
    report = runner(p, oracle, k, targets, n_max, seed=seed, jobs=jobs)
    _emit(report.to_text(), args.out)
    _write_csv(report, args.csv)
    return report.exit_status()


def cmd_magyar(args) -> int:
    return _run_experiment(args, magyar_experiment)


def cmd_bogolubov(args) -> int:
    return _run_experiment(args, bogolubov_experiment)


def cmd_weyl(args) -> int:
    polys = parse_poly_vector(args.p)
    thetas = [parse_real(x) for x in args.theta.split(",")]
    if len(thetas) != len(polys):
        raise UsageError(f"{len(polys)} polynomials but {len(thetas)} frequencies")
    if args.N < 1:
        raise UsageError("N must be >= 1")
    if args.validate_only:
        print("ok")
        return 0
    if args.exact:
        if not all(t.is_rational() for t in thetas):
            raise UsageError("--exact requires rational frequencies")
        mean = weyl_sum_rational(polys, [t.as_fraction() for t in thetas], args.N)
        value = mean.value()
        print(f"value = {value.real:.12g} + {value.imag:.12g}i")
        print(f"modulus = {abs(value):.12g}")
        print(f"exactly_zero = {'true' if mean.is_exactly_zero else 'false'}")
        return 0
    value = weyl_sum(polys, thetas, args.N, precision=args.precision or 40)
    print(f"value = {value.real:.12g} + {value.imag:.12g}i")
    print(f"modulus = {abs(value):.12g}")
    return 0


_ERGODIC_KEYS = {"x0", "observable", "p", "N", "precision", "seed", "grid"}
_ERGODIC_PREFIXES = ("row_", "comp_", "center_", "radius_")


def cmd_ergodic_avg(args) -> int:
    cfg = _load_config(args, _ERGODIC_KEYS, _ERGODIC_PREFIXES)
    system = build_system(cfg)
    kind = cfg.get_str("observable", "trig")
    observable = build_trig(cfg) if kind == "trig" else build_box(cfg)
    polys = parse_poly_vector(cfg.get_str("p"))
    n_count = cfg.get_int("N")
    if args.validate_only:
        print("ok")
        return 0
    result = empirical_average(system, observable, polys, n_count,
                               sample_grid=cfg.get_int("grid", 128))
    lines = [f"N = {n_count}",
             f"estimate = {result.value.real:.12g} + {result.value.imag:.12g}i"]
    if result.prediction is not None:
        base = [float(x.frac(system.precision)) for x in system.base_point]
        predicted = result.prediction.value_at(base)
        lines.append(f"predicted = {predicted.real:.12g} + {predicted.imag:.12g}i")
        lines.append(f"abs_error = {abs(result.value - predicted):.12g}")
        lines.append(f"l2_to_prediction = {result.l2_to_prediction:.12g}")
        csv = ("experiment,N,estimate_re,estimate_im,predicted_re,predicted_im,"
               "abs_error,std_error\n"
               f"ergodic-avg,{n_count},{result.value.real:.12g},{result.value.imag:.12g},"
               f"{predicted.real:.12g},{predicted.imag:.12g},"
               f"{abs(result.value - predicted):.12g},\n")
    else:
        csv = ("experiment,N,estimate_re,estimate_im,predicted_re,predicted_im,"
               "abs_error,std_error\n"
               f"ergodic-avg,{n_count},{result.value.real:.12g},"
               f"{result.value.imag:.12g},,,,\n")
    _emit("\n".join(lines), args.out)
    if args.csv:
        Path(args.csv).write_text(csv, encoding="utf-8")
    return 0


_CORRELATE_KEYS = {"samples", "replicates", "seed", "eps", "k", "precision"}
_CORRELATE_PREFIXES = ("row_", "center_", "radius_", "orbit_", "N_")


def cmd_correlate(args) -> int:
    cfg = _load_config(args, _CORRELATE_KEYS, _CORRELATE_PREFIXES)
    system = build_system(cfg)
    box = build_box(cfg)
    orbits = [parse_poly_vector(o) for o in cfg.indexed("orbit_")]
    n_counts = [int(x) for x in cfg.indexed("N_")]
    if len(orbits) != len(n_counts):
        raise ConfigError("need one N_i per orbit_i")
    seed = cfg.get_int("seed", 0)
    samples = cfg.get_int("samples", 512)
    replicates = cfg.get_int("replicates", 8)
    if cfg.has("k"):
        k = cfg.get_int("k")
    elif cfg.has("eps"):
        k = choose_k(system, box, cfg.get_float("eps"))
    else:
        k = 1
    if args.validate_only:
        print("ok")
        return 0
    if k != 1:
        scaled = []
        for orbit in orbits:
            var = orbit.vars[0] if orbit.vars else "n"
            n_poly = MPoly.var((var,), var) * k
            scaled.append(orbit.substitute({var: n_poly}))
        orbits = scaled
    est = correlation_average(system, box, orbits, n_counts,
                              samples=samples, replicates=replicates, seed=seed)
    # convergence diagnostic: the same estimate at halved orbit lengths
    halved = correlation_average(system, box, orbits,
                                 [max(1, n // 2) for n in n_counts],
                                 samples=samples, replicates=replicates, seed=seed)
    m = len(orbits)
    bound = float(box.measure) ** (m + 1)
    lines = [
        f"k = {k}",
        f"measure = {float(box.measure):.12g}",
        f"estimate = {est.value:.12g}",
        f"std_error = {est.std_error:.12g}",
        f"half_N_estimate = {halved.value:.12g}",
        f"power_bound = {bound:.12g}",
        f"seed = {seed}",
    ]
    _emit("\n".join(lines), args.out)
    if args.csv:
        Path(args.csv).write_text(
            "experiment,N,estimate,predicted,abs_error,std_error\n"
            f"correlate,{' '.join(str(n) for n in n_counts)},{est.value:.12g},"
            f"{bound:.12g},{abs(est.value - bound):.12g},{est.std_error:.12g}\n",
            encoding="utf-8",
        )
    return 0


# -- parser wiring ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polywalk",
        description="Exact polynomial-walk engine: construction, preservation "
                    "checks, difference-set searches, torus averages.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=False):
        p.add_argument("--out", help="also write the report to this path")
        p.add_argument("--csv", help="write CSV output to this path")
        p.add_argument("--jobs", type=int, help="worker count for searches")
        p.add_argument("--seed", type=int, help="seed for randomized pieces")
        p.add_argument("--precision", type=int, help="decimal digits for torus arithmetic")
        p.add_argument("--N-max", dest="N_max", type=int, help="search range bound")
        p.add_argument("--validate-only", action="store_true",
                       help="parse and validate inputs, skip computation")
        if config:
            p.add_argument("--config", help="key = value experiment file")

    p = sub.add_parser("check-fleeing", help="decide hyperplane-fleeing for orbit polynomials")
    p.add_argument("--poly", required=True, help="comma-separated expressions, e.g. 'n, n^2'")
    p.add_argument("--var", default="n", help="orbit variable name")
    common(p)
    p.set_defaults(func=cmd_check_fleeing)

    p = sub.add_parser("preserves", help="check a form is preserved by a walk")
    p.add_argument("--form", required=True)
    p.add_argument("--walk-from", dest="walk_from", required=True)
    common(p)
    p.set_defaults(func=cmd_preserves)

    p = sub.add_parser("walk-apply", help="apply a walk at time n to a vector")
    p.add_argument("--walk-from", dest="walk_from", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--v", required=True)
    common(p)
    p.set_defaults(func=cmd_walk_apply)

    p = sub.add_parser("construct-walk", help="build a hyperplane-fleeing walk certificate")
    p.add_argument("--gen", action="append", required=True,
                   help="generator walk spec (repeatable)")
    p.add_argument("--v", required=True)
    p.add_argument("--R-max", dest="R_max", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_construct_walk)

    p = sub.add_parser("gen", help="emit generator walks and matrices")
    p.add_argument("--family", required=True,
                   choices=["xyP", "bogolubov", "signature", "adjoint"])
    p.add_argument("--P", help="polynomial for xyP / bogolubov families")
    p.add_argument("--p", type=int, help="plus coordinates for signature")
    p.add_argument("--q", type=int, help="minus coordinates for signature")
    p.add_argument("--matrix", help="row-major integer matrix for adjoint")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("magyar", help="difference-set search for x*y - P(z) targets")
    p.add_argument("--P")
    p.add_argument("--k", type=int)
    p.add_argument("--targets", help="comma-separated integers")
    common(p, config=True)
    p.set_defaults(func=cmd_magyar)

    p = sub.add_parser("bogolubov", help="difference-set search for x - P(y) targets")
    p.add_argument("--P")
    p.add_argument("--k", type=int)
    p.add_argument("--targets")
    common(p, config=True)
    p.set_defaults(func=cmd_bogolubov)

    p = sub.add_parser("weyl", help="Weyl exponential-sum average")
    p.add_argument("--p", required=True, help="comma-separated polynomials in n")
    p.add_argument("--theta", required=True, help="comma-separated frequencies")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--exact", action="store_true",
                   help="exact root-of-unity path (rational frequencies)")
    common(p)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("ergodic-avg", help="polynomial orbit average on a torus system")
    common(p, config=True)
    p.set_defaults(func=cmd_ergodic_avg)

    p = sub.add_parser("correlate", help="multiple correlation average estimate")
    common(p, config=True)
    p.set_defaults(func=cmd_correlate)

    return parser


_GRAMMAR = """expression grammar:
  expr   := term (("+"|"-") term)*
  term   := factor ("*" factor)*
  factor := base ("^" nonneg-int)?
  base   := number | identifier | "(" expr ")" | "-" base
  number := nonneg-int ("/" nonneg-int)?"""


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except PolySyntaxError as exc:
        print(f"error: {exc}\n{_GRAMMAR}", file=sys.stderr)
        return 1
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, NotUnipotent, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
