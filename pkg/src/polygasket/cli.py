"""Command-line frontend: ``python -m polygasket <command> ...``.

Exit status is 0 on success, 1 when ``validate`` finds a mismatch or a numerical
routine fails, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import decimation, gasket_graph, spectrum
from .laplacian import MAX_DENSE_DIM, dense_spectrum, dirichlet_block, schur_complement
from .laplacian import laplacian as laplacian_of

ROUND = 12


@dataclass(frozen=True)
class RunConfig:
    command: str
    N: int
    options: dict
    jobs: int = 1
    output: str | None = None


def _num(x: float) -> float:
    v = round(float(x), ROUND)
    return 0.0 if v == 0 else v


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _atoms_csv(pairs, header="value,mult") -> str:
    lines = [header]
    lines += [f"{_num(v)!r},{m}" for v, m in pairs]
    return "\n".join(lines)


def _spectrum_doc(N, level, dim, pairs) -> dict:
    return {"N": N, "level": level, "dim": dim,
            "atoms": [{"value": _num(v), "mult": int(m)} for v, m in pairs]}


# --- commands ----------------------------------------------------------------

def cmd_graph(cfg: RunConfig) -> tuple[int, str]:
    g = gasket_graph.build(cfg.N, cfg.options["level"])
    if cfg.options["format"] == "edgelist":
        return 0, gasket_graph.edgelist_text(g).rstrip("\n")
    return 0, _dump(gasket_graph.graph_json(g))


def cmd_spectrum(cfg: RunConfig) -> tuple[int, str]:
    N, level = cfg.N, cfg.options["level"]
    if cfg.options["method"] == "oracle":
        rep = dense_spectrum(laplacian_of(gasket_graph.build(N, level)))
        pairs, dim = rep.atoms, rep.dimension
    else:
        spec = spectrum.finite_spectrum(N, level, jobs=cfg.jobs)
        pairs, dim = spec.as_pairs(), spec.dim
    if cfg.options["out"] == "csv":
        return 0, _atoms_csv(pairs)
    return 0, _dump(_spectrum_doc(N, level, dim, pairs))


def cmd_rmap(cfg: RunConfig) -> tuple[int, str]:
    N, o = cfg.N, cfg.options
    doc: dict = {"N": N}
    if o["eval"] is not None:
        z = o["eval"]
        doc["z"] = z
        doc["R"] = _num(decimation.r_closed_form(N, z))
        try:
            doc["phi"] = _num(decimation.phi_closed_form(N, z))
        except decimation.PoleError:
            doc["phi"] = None
    if o["coeffs"]:
        rm = decimation.r_as_rational(N)
        doc["numerator"] = [int(c) for c in rm.numerator.coeffs]
        doc["denominator"] = [int(c) for c in rm.denominator.coeffs]
    everything = not (o["poles"] or o["sets"] or o["coeffs"] or o["eval"] is not None)
    if o["poles"] or everything:
        doc["poles"] = [_num(p) for p in decimation.poles_of_r(N)]
    if o["sets"] or everything:
        doc["A"] = [_num(v) for v in decimation.set_A(N)]
        doc["B"] = [_num(v) for v in decimation.set_B(N)]
        doc["exceptional"] = [_num(v) for v in decimation.exceptional_set(N)]
    return 0, _dump(doc)


def cmd_fractal(cfg: RunConfig) -> tuple[int, str]:
    eigs = spectrum.fractal_eigenvalues(cfg.N, cfg.options["count"], cfg.options["iters"], jobs=cfg.jobs)
    if cfg.options["out"] == "csv":
        lines = ["k,lambda_k,mult"] + [f"{k},{_num(v)!r},{m}" for k, (v, m) in enumerate(eigs)]
        return 0, "\n".join(lines)
    return 0, _dump({"N": cfg.N, "count": len(eigs),
                     "eigenvalues": [{"k": k, "lambda": _num(v), "mult": m} for k, (v, m) in enumerate(eigs)]})


def cmd_dos(cfg: RunConfig) -> tuple[int, str]:
    d = spectrum.dos_atoms(cfg.N, cfg.options["depth"], jobs=cfg.jobs)
    if cfg.options["out"] == "csv":
        return 0, "\n".join(["value,weight"] + [f"{_num(v)!r},{_num(w)!r}" for v, w in d.atoms])
    return 0, _dump({"N": d.N, "depth": d.depth, "mass": _num(d.mass),
                     "atoms": [{"value": _num(v), "weight": _num(w)} for v, w in d.atoms]})


def cmd_gaps(cfg: RunConfig) -> tuple[int, str]:
    count = cfg.options["count"]
    eigs = spectrum.fractal_eigenvalues(cfg.N, count + 1, cfg.options["iters"], jobs=cfg.jobs)
    window = spectrum.repeated(eigs)[:count]
    ratios, worst = spectrum.gap_ratios(window)
    k = int(np.argmax(ratios))
    return 0, _dump({"N": cfg.N, "count": len(window), "max_ratio": _num(worst),
                     "at": [_num(window[k]), _num(window[k + 1])]})


def cmd_metric(cfg: RunConfig) -> tuple[int, str]:
    p = gasket_graph.params(cfg.N)
    level = cfg.options["level"]
    g = gasket_graph.build(cfg.N, level)
    doc = {"N": cfg.N, "level": level, "diameter": gasket_graph.diameter(g),
           "c": p.c, "rho": _num(float(p.rho)), "alpha": _num(p.alpha),
           "d_H": _num(p.d_H), "d_w": _num(p.d_w), "d_s": _num(p.d_s)}
    x, y = cfg.options["x"], cfg.options["y"]
    if x is not None and y is not None:
        doc["graph_distance"] = gasket_graph.graph_distance(g, x, y)
        doc["geodesic_distance"] = _num(gasket_graph.geodesic_distance(cfg.N, level, x, y, graph=g))
    return 0, _dump(doc)


def _compare(a, b, tol) -> str | None:
    if len(a) != len(b):
        return f"{len(a)} atoms vs {len(b)}"
    for (va, ma), (vb, mb) in zip(a, b):
        if abs(va - vb) > tol or ma != mb:
            return f"atom {va:.12g}x{ma} vs {vb:.12g}x{mb}"
    return None


def cmd_validate(cfg: RunConfig) -> tuple[int, str]:
    tol = cfg.options["tol"]
    lines, failed = [], 0

    def report(name, problem):
        nonlocal failed
        failed += problem is not None
        lines.append(f"{'ok  ' if problem is None else 'FAIL'} {name}" + ("" if problem is None else f": {problem}"))

    rng = np.random.default_rng(0)
    for N in range(1, cfg.options["max_N"] + 1):
        lap1 = laplacian_of(gasket_graph.build(N, 1))
        oracle1 = dense_spectrum(lap1)
        report(f"sigma_level1 N={N}", _compare(decimation.sigma_level1(N).as_pairs(), oracle1.atoms, tol))
        worst = 0.0
        d_eigs = dirichlet_block(lap1)[1].eigenvalues
        avoid = np.concatenate([d_eigs, decimation.poles_of_phi(N)])
        for z in rng.uniform(0.0, 1.5, 20):
            if np.min(np.abs(avoid - z)) < 1e-3:
                continue
            S = schur_complement(lap1, z)
            target = decimation.phi_closed_form(N, z) * (
                laplacian_of(gasket_graph.build(N, 0)).entries - decimation.r_closed_form(N, z) * np.eye(3))
            worst = max(worst, float(np.max(np.abs(S - target))))
        report(f"schur identity N={N}", None if worst < tol else f"max deviation {worst:.3g}")
        for n in range(0, cfg.options["max_level"] + 1):
            if gasket_graph.vertex_count(N, n) > MAX_DENSE_DIM:
                lines.append(f"skip finite_spectrum N={N} n={n}: above the dense guard")
                continue
            oracle = dense_spectrum(laplacian_of(gasket_graph.build(N, n)))
            try:
                dec = spectrum.finite_spectrum(N, n, jobs=cfg.jobs).as_pairs()
                problem = _compare(dec, oracle.atoms, tol)
            except spectrum.MultiplicityError as exc:
                problem = str(exc)
            report(f"finite_spectrum N={N} n={n}", problem)
    lines.append(f"{failed} failure(s)")
    return (1 if failed else 0), "\n".join(lines)


COMMANDS = {
    "graph": cmd_graph,
    "spectrum": cmd_spectrum,
    "rmap": cmd_rmap,
    "fractal-eigs": cmd_fractal,
    "dos": cmd_dos,
    "gaps": cmd_gaps,
    "metric": cmd_metric,
    "validate": cmd_validate,
}


def run(cfg: RunConfig) -> tuple[int, str]:
    """Dispatch a validated config; returns (exit status, text output)."""
    return COMMANDS[cfg.command](cfg)


# --- argument parsing ----------------------------------------------------------

def _positive(name):
    def conv(text):
        v = int(text)
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {v}")
        return v
    return conv


def _nonneg(name):
    def conv(text):
        v = int(text)
        if v < 0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0, got {v}")
        return v
    return conv


def _positive_float(text):
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"tolerance must be a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=_positive("--jobs"), default=1,
                        help="worker processes for preimage solves (output order is unchanged)")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="polygasket", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_N=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if needs_N:
            p.add_argument("--N", type=_positive("--N"), required=True)
        return p

    p = add("graph", "emit the level-n graph")
    p.add_argument("--level", type=_nonneg("--level"), required=True)
    p.add_argument("--format", choices=("edgelist", "json"), default="edgelist")

    p = add("spectrum", "level-n spectrum with multiplicities")
    p.add_argument("--level", type=_nonneg("--level"), required=True)
    p.add_argument("--method", choices=("oracle", "decimation"), default="decimation")
    p.add_argument("--out", choices=("json", "csv"), default="json")

    p = add("rmap", "the decimation map R and its special sets")
    p.add_argument("--eval", type=float, default=None, metavar="Z")
    p.add_argument("--coeffs", action="store_true")
    p.add_argument("--poles", action="store_true")
    p.add_argument("--sets", action="store_true")

    p = add("fractal-eigs", "smallest eigenvalues of the fractal Laplacian")
    p.add_argument("--count", type=_positive("--count"), default=20)
    p.add_argument("--iters", type=_positive("--iters"), default=60)
    p.add_argument("--out", choices=("json", "csv"), default="json")

    p = add("dos", "atoms of the density of states")
    p.add_argument("--depth", type=_nonneg("--depth"), default=3)
    p.add_argument("--out", choices=("json", "csv"), default="json")

    p = add("gaps", "largest consecutive eigenvalue ratio")
    p.add_argument("--count", type=_positive("--count"), default=200)
    p.add_argument("--iters", type=_positive("--iters"), default=60)

    p = add("metric", "graph diameter, distances and dimension constants")
    p.add_argument("--level", type=_nonneg("--level"), default=1)
    p.add_argument("--x", type=_nonneg("--x"), default=None)
    p.add_argument("--y", type=_nonneg("--y"), default=None)

    p = add("validate", "decimation against the dense oracle", needs_N=False)
    p.add_argument("--max-N", dest="max_N", type=_positive("--max-N"), default=3)
    p.add_argument("--max-level", dest="max_level", type=_nonneg("--max-level"), default=3)
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    return parser


def _config(parser, args) -> RunConfig:
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "N", "jobs", "output")}
    if args.command == "dos" and opts["depth"] > spectrum.MAX_DOS_DEPTH:
        parser.error(f"--depth must be <= {spectrum.MAX_DOS_DEPTH}")
    if args.command == "rmap":
        if opts["coeffs"] and args.N > decimation.EXACT_N_LIMIT:
            parser.error(f"--coeffs needs --N <= {decimation.EXACT_N_LIMIT}")
        if opts["eval"] is not None and not math.isfinite(opts["eval"]):
            parser.error("--eval must be finite")
    if args.command in ("graph", "spectrum", "metric"):
        size = gasket_graph.vertex_count(args.N, opts["level"])
        if size > gasket_graph.MAX_VERTICES:
            parser.error(f"--level {opts['level']} gives {size} vertices for N={args.N}")
        if args.command == "spectrum" and opts["method"] == "oracle" and size > MAX_DENSE_DIM:
            parser.error(f"--method oracle is limited to {MAX_DENSE_DIM} vertices, got {size}")
    if args.command == "metric" and (opts["x"] is None) != (opts["y"] is None):
        parser.error("--x and --y go together")
    return RunConfig(command=args.command, N=getattr(args, "N", 0), options=opts,
                     jobs=args.jobs, output=args.output)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config(parser, args)
    try:
        status, text = run(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
