"""Command-line front end.

Subcommands ``iterate``, ``fourier``, ``certify`` and ``oracle`` write
figure-ready CSV files and JSON reports into ``--out-dir``. Settings come
from flags or from a ``key=value`` file given with ``--config``; a flag on
the command line always wins over the file.

Measures are written as nested expressions::

    lebesgue | bernoulli | bernoulli(p) | atoms(x:w, x:w, ...)
    gaussian(omega) | ifs(<measure>, delta)

Numbers may be simple arithmetic such as ``2/5``, ``2**-0.5`` or
``1/plastic`` (``plastic`` is the smallest Pisot number).

Exit codes: 0 success or certified, 2 I/O or configuration error,
3 not certified, 4 inconclusive verdict or failed oracle check.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from .certificate import certify
from .classify import Continuity, classify, estimate_decay_exponent, estimate_sobolev_dimension
from .density import reconstruct
from .measures import (Atoms, DomainError, GaussianDensity, IFSInvariant, Lebesgue,
                       MeasureSpec, TruncationError, bernoulli)
from .montecarlo import chaos_game, empirical_coefficients
from .products import PLASTIC_NUMBER, product_transform, refined_density_mapping
from .transfer import CoefficientVector, iterate_to_fixed_point

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CERTIFIED = 3
EXIT_INCONCLUSIVE = 4

CSV_FMT = "%.11e"  # 12 significant digits


class ConfigError(Exception):
    pass


# --------------------------------------------------------------------------
# numbers and measure expressions

_CONSTANTS = {"plastic": PLASTIC_NUMBER, "pi": math.pi, "sqrt2": math.sqrt(2.0)}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_number(text: str) -> float:
    """Evaluate a small arithmetic expression (numbers, + - * / **, named constants)."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"cannot read number {text!r}")
    try:
        val = ev(ast.parse(text.strip().replace("^", "**"), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot read number {text!r}") from exc
    if not math.isfinite(val):
        raise ConfigError(f"number {text!r} is not finite")
    return val


def _split_args(body: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_measure(text: str) -> MeasureSpec:
    """Parse a measure expression into a :data:`MeasureSpec`."""
    s = text.strip().lower()
    name, _, rest = s.partition("(")
    name = name.strip()
    if rest:
        if not rest.endswith(")"):
            raise ConfigError(f"unbalanced parentheses in {text!r}")
        args = _split_args(rest[:-1])
    else:
        args = []
    try:
        if name == "lebesgue" and not args:
            return Lebesgue()
        if name == "bernoulli" and len(args) <= 1:
            return bernoulli(parse_number(args[0])) if args else bernoulli()
        if name == "atoms" and args:
            pairs = [a.split(":") for a in args]
            if any(len(p) != 2 for p in pairs):
                raise ConfigError(f"atoms need location:weight pairs in {text!r}")
            return Atoms(tuple(parse_number(p[0]) for p in pairs),
                         tuple(parse_number(p[1]) for p in pairs))
        if name == "gaussian" and len(args) == 1:
            return GaussianDensity(parse_number(args[0]))
        if name == "ifs" and len(args) == 2:
            return IFSInvariant(parse_measure(args[0]), parse_number(args[1]))
    except DomainError as exc:
        raise ConfigError(f"invalid measure {text!r}: {exc}") from exc
    raise ConfigError(f"unknown measure expression {text!r}")


# --------------------------------------------------------------------------
# configuration

@dataclass
class ExperimentConfig:
    sigma: str = "bernoulli"
    delta: str = "2/5"
    delta2: str | None = None
    init: str = "uniform"
    algorithm: str = "spectral"
    metric: str = "coeff_sum"
    M: int = 100
    grid: int | None = None
    eps: float = 1e-8
    max_iter: int = 200
    seed: int = 42
    k_max: int | None = None
    n_samples: int = 1_000_000
    burn_in: int = 100
    densities: str = "1,2,3,4,5"
    out_dir: str = "."

    def driving_measure(self) -> MeasureSpec:
        """Measure of the fixed points for the outermost IFS level."""
        base = parse_measure(self.sigma)
        if self.delta2 is None:
            return base
        return IFSInvariant(base, parse_number(self.delta))

    def contraction(self) -> float:
        return parse_number(self.delta2 if self.delta2 is not None else self.delta)

    def target(self) -> IFSInvariant:
        try:
            return IFSInvariant(self.driving_measure(), self.contraction())
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def resolved(self) -> dict:
        d = asdict(self)
        d["delta_value"] = parse_number(self.delta)
        if self.delta2 is not None:
            d["delta2_value"] = parse_number(self.delta2)
        return d


_FIELD_TYPES = {"M": int, "grid": int, "eps": float, "max_iter": int, "seed": int,
                "k_max": int, "n_samples": int, "burn_in": int}


def _coerce(key: str, value: str):
    conv = _FIELD_TYPES.get(key)
    if conv is None:
        return value
    try:
        return conv(parse_number(value)) if conv is int else conv(value)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def read_config_file(path: str) -> dict:
    """``key=value`` lines; ``#`` starts a comment; keys may use ``-`` or ``_``."""
    known = {f.name for f in fields(ExperimentConfig)}
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in known:
            raise ConfigError(f"{path}:{lineno}: cannot parse {line!r}")
        out[key] = _coerce(key, value.strip())
    return out


def build_config(ns: argparse.Namespace) -> ExperimentConfig:
    """Merge flags over config-file values over the dataclass defaults."""
    values = read_config_file(ns.config) if getattr(ns, "config", None) else {}
    for f in fields(ExperimentConfig):
        v = getattr(ns, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = ExperimentConfig(**values)
    if cfg.algorithm not in ("spectral", "refined"):
        raise ConfigError("algorithm must be 'spectral' or 'refined'")
    if cfg.M < 1 or cfg.max_iter < 1 or cfg.eps <= 0:
        raise ConfigError("M and max_iter must be positive and eps > 0")
    parse_number(cfg.delta)
    if cfg.delta2 is not None:
        parse_number(cfg.delta2)
    return cfg


# --------------------------------------------------------------------------
# output helpers

def _out_path(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def write_csv(path: str, header: list, columns: list, int_cols: int = 1) -> None:
    """Comma-separated table; the first ``int_cols`` columns are integers."""
    data = np.column_stack([np.asarray(c, float) for c in columns])
    fmt = ["%d"] * int_cols + [CSV_FMT] * (len(columns) - int_cols)
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=",".join(header), comments="")


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _initial(cfg: ExperimentConfig) -> CoefficientVector:
    if cfg.init.strip().lower() == "uniform":
        return CoefficientVector.uniform(cfg.M)
    return CoefficientVector.from_measure(parse_measure(cfg.init), cfg.M)


def _densities_wanted(cfg: ExperimentConfig) -> set:
    try:
        return {int(v) for v in cfg.densities.split(",") if v.strip()}
    except ValueError as exc:
        raise ConfigError(f"densities must be a comma-separated list of integers: {cfg.densities!r}") from exc


# --------------------------------------------------------------------------
# commands

def cmd_iterate(cfg: ExperimentConfig) -> int:
    """Density mapping: densities.csv, distances.csv and report.json."""
    target = cfg.target()
    wanted = _densities_wanted(cfg)
    keep = lambda n: n in wanted  # noqa: E731
    if cfg.algorithm == "spectral":
        final, report, history = iterate_to_fixed_point(
            _initial(cfg), target.sigma, target.delta, eps_stop=cfg.eps, max_iter=cfg.max_iter,
            monitor_metric=cfg.metric, n_grid=cfg.grid, keep=keep)
    else:
        if cfg.init.strip().lower() == "uniform":
            mu0 = Lebesgue()
        else:
            mu0 = parse_measure(cfg.init)
        final, report, history = refined_density_mapping(
            mu0, target.sigma, target.delta, cfg.M, eps_stop=cfg.eps, max_iter=cfg.max_iter,
            monitor_metric=cfg.metric, n_grid=cfg.grid, keep=keep)
    history[report.n_final] = final

    rows_n, rows_x, rows_rho = [], [], []
    for n in sorted(history):
        g = reconstruct(history[n], cfg.grid)
        rows_n.append(np.full(g.rho.size, n))
        rows_x.append(g.x)
        rows_rho.append(g.rho)
    write_csv(_out_path(cfg, "densities.csv"), ["n", "x", "rho"],
              [np.concatenate(rows_n), np.concatenate(rows_x), np.concatenate(rows_rho)])

    write_csv(_out_path(cfg, "distances.csv"), ["n", "d1", "d2", "d3", "d4", "bv"],
              [report.series("n"), report.series("d1"), report.series("d2"),
               report.series("d3"), report.series("d4"), report.series("bv_norm")])

    k_max = cfg.k_max or max(2000, cfg.M)
    k = np.arange(1, k_max + 1)
    decay = estimate_decay_exponent(k, np.abs(product_transform(target.sigma, target.delta, np.pi * k)))
    sob = estimate_sobolev_dimension(target)
    verdict = classify(report, decay, sob)
    payload = {
        "config": cfg.resolved(),
        "iteration": report.to_dict(),
        "verdict": report.verdict.value,
        "classification": verdict.to_dict(),
        "bv_initial": report.bv_initial,
        "final_l1": report.records[-1].l1_norm if report.records else None,
        "decay_fit": asdict(decay),
        "sobolev": asdict(sob),
    }
    write_json(_out_path(cfg, "report.json"), payload)
    print(f"iteration verdict: {report.verdict.value} after {report.n_final} steps; "
          f"classification: {verdict.verdict.value}")
    return EXIT_INCONCLUSIVE if verdict.verdict is Continuity.INCONCLUSIVE else EXIT_OK


def cmd_fourier(cfg: ExperimentConfig) -> int:
    """Product-formula coefficients: coefficients.csv, density.csv and report.json."""
    target = cfg.target()
    k_max = cfg.k_max or 1000
    k = np.arange(0, k_max + 1)
    c = product_transform(target.sigma, target.delta, np.pi * k)
    kk = np.where(k > 0, k, np.nan).astype(float)
    write_csv(_out_path(cfg, "coefficients.csv"),
              ["k", "re", "im", "abs", "k^-1/2", "k^-1", "k^-2"],
              [k, c.real, c.imag, np.abs(c), kk ** -0.5, kk ** -1.0, kk ** -2.0])  # nan at k = 0

    M = min(cfg.M, k_max)
    g = reconstruct(CoefficientVector.from_nonnegative(c[: M + 1]), cfg.grid)
    write_csv(_out_path(cfg, "density.csv"), ["x", "rho"], [g.x, g.rho], int_cols=0)

    decay = estimate_decay_exponent(k[1:], np.abs(c[1:]))
    verdict = classify(decay=decay)
    write_json(_out_path(cfg, "report.json"), {
        "config": cfg.resolved(),
        "decay_fit": asdict(decay),
        "classification": verdict.to_dict(),
        "density_norms": g.norms(),
    })
    print(f"decay exponent: {decay.gamma}; Fourier-only verdict: {verdict.verdict.value}")
    return EXIT_OK


def cmd_certify(cfg: ExperimentConfig) -> int:
    """Cascade certificate: certificate.json; exit 3 when not certified."""
    mu0 = parse_measure(cfg.sigma)
    delta = parse_number(cfg.delta)
    try:
        cert = certify(mu0, delta)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    write_json(_out_path(cfg, "certificate.json"), {"config": cfg.resolved(), **cert.to_dict()})
    print(f"eta = {cert.eta:.6f}, ratio = {cert.ratio:.6f}, verdict: {cert.verdict.value}")
    return EXIT_OK if cert.certified else EXIT_NOT_CERTIFIED


def cmd_oracle(cfg: ExperimentConfig) -> int:
    """Chaos-game check of the product coefficients: oracle.csv and oracle_summary.json."""
    target = cfg.target()
    k_max = cfg.k_max or 50
    emp = chaos_game(target.sigma, target.delta, cfg.n_samples, burn_in=cfg.burn_in, seed=cfg.seed)
    c_emp, se = empirical_coefficients(emp, k_max)
    k = np.arange(1, k_max + 1)
    c_alg = product_transform(target.sigma, target.delta, np.pi * k)
    e = c_emp.nonnegative[1:]
    s = se[k_max + 1:]
    z = np.abs(e - c_alg) / s
    write_csv(_out_path(cfg, "oracle.csv"),
              ["k", "c_alg", "c_emp", "stderr", "z_score", "c_alg_im", "c_emp_im"],
              [k, c_alg.real, e.real, s, z, c_alg.imag, e.imag])
    frac = float(np.mean(z < 3.0))
    passed = frac >= 0.95
    write_json(_out_path(cfg, "oracle_summary.json"), {
        "config": cfg.resolved(),
        "n_samples": emp.n,
        "fraction_within_3se": frac,
        "max_z": float(z.max()),
        "pass": passed,
    })
    print(f"{frac:.1%} of |z| < 3 (max {z.max():.2f}): {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_INCONCLUSIVE


COMMANDS = {"iterate": cmd_iterate, "fourier": cmd_fourier, "certify": cmd_certify,
            "oracle": cmd_oracle}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="affine-ifs", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        sp = sub.add_parser(name, help=func.__doc__.split("\n")[0])
        sp.add_argument("--config", help="key=value file; flags override it")
        sp.add_argument("--sigma", help="driving measure expression")
        sp.add_argument("--delta", help="contraction ratio (inner ratio for cascades)")
        sp.add_argument("--delta2", help="outer ratio; drives the outer IFS with ifs(sigma, delta)")
        sp.add_argument("--init", help="initial measure expression or 'uniform'")
        sp.add_argument("--algorithm", choices=("spectral", "refined"))
        sp.add_argument("--metric", choices=("coeff_sum", "l1", "linf", "bv"))
        sp.add_argument("--M", dest="M", type=int, help="coefficient truncation |k| <= M")
        sp.add_argument("--grid", type=int, help="reconstruction grid intervals")
        sp.add_argument("--eps", type=float, help="convergence threshold")
        sp.add_argument("--max-iter", dest="max_iter", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--k-max", dest="k_max", type=int, help="largest coefficient index")
        sp.add_argument("--n-samples", dest="n_samples", type=int)
        sp.add_argument("--burn-in", dest="burn_in", type=int)
        sp.add_argument("--densities", help="iterates to store, e.g. 1,2,3,4,5")
        sp.add_argument("--out-dir", dest="out_dir")
        sp.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = build_config(ns)
        return ns.func(cfg)
    except (ConfigError, DomainError, TruncationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
