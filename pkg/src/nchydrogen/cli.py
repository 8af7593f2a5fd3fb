"""Command-line front end.

Subcommands
-----------
verify
    Identity suites of the Fock-space algebra (exit 1 if any check fails).
spectrum
    Analytic against numeric bound-state energies.
wavefunction
    Analytic against numeric radial eigenvectors for one ``(n, j)``.
lambda0
    Self-energy estimate of the length scale and related magnitudes.
convergence
    Commutative-limit sweep in ``lambda`` and truncation sweep in ``n_max``.

Every command writes one table, CSV (with a versioned schema comment) or
JSON.  Floats are printed with 17 significant digits so reruns are
byte-identical.  Exit codes: 0 pass, 1 check failure, 2 invalid config.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import analytic_radial_sequence, bound_energy, commutative_energy, energy_shift
from .coulomb_field import load_constants, poisson_residual, poisson_solve, self_energy_lambda0
from .fock_algebra import (
    PAULI,
    FockBasis,
    appendix_a_identity_suite,
    binomial_identity_check,
    check_coordinate_algebra,
    hermiticity_suite,
    poisson_operator_check,
)
from .radial_engine import build_pencil, sequence_inner, sequence_norm, solve_bound_states

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

COLUMNS = {
    "verify": ["check", "residual", "passed", "mode"],
    "spectrum": ["n", "j", "lambda", "E_analytic", "E_numeric", "rel_err", "n_max", "tail"],
    "wavefunction": ["N", "R_analytic", "R_numeric", "diff"],
    "lambda0": ["quantity", "value", "unit"],
    "convergence": ["section", "n", "lambda", "n_max", "quantity", "value"],
}

DEFAULT_LAMBDA = {"verify": 1.0}
DEFAULT_NMAX = {"verify": 30, "convergence": 100}


class ConfigError(ValueError):
    """Raised for configurations that cannot be run (exit code 2)."""


@dataclass
class RunConfig:
    """Validated settings of one CLI invocation.

    ``n_range`` is inclusive.  ``sigma`` replaces the Pauli matrices in the
    coordinate-algebra check and exists for negative-control tests.
    """

    command: str
    lam: float = 0.1
    j: int = 0
    n_max: int = 800
    n_range: tuple[int, int] | None = None
    fmt: str = "csv"
    out: Path | None = None
    constants: Path | None = None
    exact: bool = False
    rtol: float = 1e-12
    spectrum_tol: float = 1e-8
    lambda_range: tuple[float, float] = (1e-4, 1e-2)
    points: int = 9
    doublings: int = 4
    sigma: tuple = field(default=PAULI, repr=False)

    def validate(self) -> "RunConfig":
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ConfigError(f"lambda must be a finite non-negative number, got {self.lam}")
        if self.j < 0:
            raise ConfigError(f"j must be non-negative, got {self.j}")
        if self.n_max < self.j + 2:
            raise ConfigError(f"n_max must be at least j + 2 = {self.j + 2}, got {self.n_max}")
        if self.rtol <= 0 or self.spectrum_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if self.n_range is not None:
            lo, hi = self.n_range
            if lo < self.j + 1 or hi < lo:
                raise ConfigError(f"n range {lo}:{hi} invalid for j={self.j} (need j+1 <= lo <= hi)")
        lo, hi = self.lambda_range
        if not 0 < lo < hi:
            raise ConfigError("lambda range must satisfy 0 < min < max")
        if self.points < 2 or self.doublings < 1:
            raise ConfigError("need at least 2 sweep points and 1 doubling")
        if self.command == "wavefunction" and self.lam == 0:
            raise ConfigError("wavefunction needs lambda > 0 (the pencil has step lambda)")
        return self

    def ns(self, default_count: int = 4) -> range:
        if self.n_range is None:
            return range(self.j + 1, self.j + 1 + default_count)
        return range(self.n_range[0], self.n_range[1] + 1)


# -- output -----------------------------------------------------------------


def _fmt_value(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return format(float(v), ".17g")
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(command: str, rows: list[dict], fmt: str, meta: dict | None = None) -> str:
    """Serialize ``rows`` with the fixed column set of ``command``."""
    cols = COLUMNS[command]
    if fmt == "json":
        doc = {
            "schema": f"nchydrogen.{command}.v{SCHEMA_VERSION}",
            "meta": {k: _json_value(v) for k, v in (meta or {}).items()},
            "columns": cols,
            "rows": [{c: _json_value(r.get(c)) for c in cols} for r in rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    meta_txt = " ".join(f"{k}={_fmt_value(v)}" for k, v in (meta or {}).items())
    buf.write(f"# nchydrogen {command} schema v{SCHEMA_VERSION} {meta_txt}".rstrip() + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_fmt_value(r.get(c)) for c in cols])
    return buf.getvalue()


# -- commands ---------------------------------------------------------------


def cmd_verify(cfg: RunConfig):
    """Run every identity suite; returns ``(rows, meta, exit_code)``."""
    basis = FockBasis(cfg.n_max)
    lam = Fraction(cfg.lam).limit_denominator(10**6) if cfg.exact else cfg.lam
    if lam == 0:
        raise ConfigError("verify needs lambda > 0")
    checks = []
    checks += check_coordinate_algebra(basis, lam, cfg.exact, cfg.rtol, sigma=cfg.sigma)
    checks += appendix_a_identity_suite(basis, lam, cfg.exact, cfg.rtol)
    checks += hermiticity_suite(basis, lam, exact=cfg.exact, rtol=cfg.rtol, trials=1)
    checks.append(poisson_operator_check(basis, 1, lam, 0, cfg.exact, cfg.rtol))
    checks.append(binomial_identity_check(cfg.n_max))
    rows = [
        {"check": c.name, "residual": c.residual, "passed": c.passed, "mode": "exact" if c.exact else "float"}
        for c in checks
    ]
    # the recurrence solution of the Poisson equation against its closed form
    pot = poisson_solve(1, 0, cfg.n_max, Fraction(lam) if cfg.exact else lam)
    rec = max((abs(float(x)) for x in poisson_residual(pot.values)), default=0.0)
    closed = max(abs(float(a - b)) for a, b in zip(pot.values, pot.closed_form()))
    ok = (rec == 0 and closed == 0) if cfg.exact else max(rec, closed) <= cfg.rtol * abs(float(pot.values[0]))
    rows.append({"check": "Poisson recurrence vs -q/r closed form", "residual": max(rec, closed), "passed": ok,
                 "mode": "exact" if cfg.exact else "float"})
    failed = [r["check"] for r in rows if not r["passed"]]
    for name in failed:
        print(f"FAILED: {name}", file=sys.stderr)
    meta = {"n_max": cfg.n_max, "lambda": float(lam), "exact": cfg.exact, "failed": len(failed)}
    return rows, meta, EXIT_FAIL if failed else EXIT_OK


def _numeric_energies(j: int, lam: float, n_max: int):
    pencil = build_pencil(j, lam, 2, n_max)
    return solve_bound_states(pencil)


def cmd_spectrum(cfg: RunConfig):
    """Analytic and numeric energies for ``n`` in the requested range.

    At ``lambda = 0`` only the analytic column is filled (the pencil step is
    ``lambda``).
    """
    rows = []
    ns = cfg.ns()
    sols = _numeric_energies(cfg.j, cfg.lam, cfg.n_max) if cfg.lam > 0 else None
    unconverged, missing = [], []
    for n in ns:
        E_a = bound_energy(n, cfg.lam).energy
        row = {"n": n, "j": cfg.j, "lambda": cfg.lam, "E_analytic": E_a, "n_max": cfg.n_max}
        k = n - cfg.j - 1
        if sols is not None and k < len(sols):
            E_n = -0.5 * sols[k].kappa2
            row.update(E_numeric=E_n, rel_err=abs(E_n - E_a) / abs(E_a), tail=sols[k].tail_fraction)
            if sols[k].truncation_sensitive:
                unconverged.append(n)
        else:
            row.update(E_numeric=math.nan, rel_err=math.nan, tail=math.nan)
            if sols is not None:
                missing.append(n)
        rows.append(row)
    if unconverged:
        print(
            f"warning: states n={unconverged} hold a visible fraction of their norm near n_max={cfg.n_max}; "
            "increase --nmax",
            file=sys.stderr,
        )
    if missing:
        print(f"warning: no numeric bound state for n={missing} at n_max={cfg.n_max}", file=sys.stderr)
    meta = {"j": cfg.j, "lambda": cfg.lam, "n_max": cfg.n_max, "units": "hartree"}
    return rows, meta, EXIT_OK


def cmd_wavefunction(cfg: RunConfig):
    """Normalised analytic and numeric radial sequences of one state."""
    if cfg.n_range is not None and cfg.n_range[0] != cfg.n_range[1]:
        raise ConfigError("wavefunction takes a single --n")
    n = cfg.n_range[0] if cfg.n_range else cfg.j + 1
    seq = analytic_radial_sequence(n, cfg.j, cfg.lam, cfg.n_max)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        norm = math.sqrt(sequence_norm(seq))
    analytic = np.asarray(seq.values, float) / norm
    sols = _numeric_energies(cfg.j, cfg.lam, cfg.n_max)
    k = n - cfg.j - 1
    if k >= len(sols):
        print(f"no numeric bound state n={n} at n_max={cfg.n_max}", file=sys.stderr)
        return [], {"n": n, "j": cfg.j}, EXIT_FAIL
    numeric = np.asarray(sols[k].sequence.values, float)
    if sequence_inner(sols[k].sequence, type(seq)(cfg.j, cfg.lam, analytic)) < 0:
        numeric = -numeric
    rows = [
        {"N": cfg.j + i, "R_analytic": a, "R_numeric": b, "diff": b - a}
        for i, (a, b) in enumerate(zip(analytic, numeric))
    ]
    meta = {
        "n": n,
        "j": cfg.j,
        "lambda": cfg.lam,
        "n_max": cfg.n_max,
        "max_abs_diff": float(np.max(np.abs(numeric - analytic))),
    }
    return rows, meta, EXIT_OK


def cmd_lambda0(cfg: RunConfig):
    """Self-energy length scale and the magnitudes it implies."""
    consts = load_constants(cfg.constants)
    rep = self_energy_lambda0(consts)
    rows = [
        {"quantity": "lambda0", "value": rep.lambda0, "unit": "m"},
        {"quantity": "lambda0_over_r0", "value": rep.ratio_to_r0, "unit": "1"},
        {"quantity": "lambda0_over_r0_exact", "value": str(rep.ratio_to_r0), "unit": "1"},
        {"quantity": "r0", "value": rep.r0, "unit": "m"},
        {"quantity": "a0", "value": rep.bohr_radius, "unit": "m"},
        {"quantity": "fine_structure", "value": rep.fine_structure, "unit": "1"},
        {"quantity": "lambda0_over_a0", "value": rep.lambda0_over_a0, "unit": "1"},
        {"quantity": "nine_64_alpha2", "value": rep.nine_64_alpha2, "unit": "1"},
        {"quantity": "relative_level_shift_n1", "value": rep.relative_level_shift_n1, "unit": "1"},
    ]
    for K, S, gap, rem in rep.partial_sums:
        rows.append({"quantity": f"partial_sum_K{K}", "value": S, "unit": "1"})
        rows.append({"quantity": f"gap_to_3/4_K{K}", "value": gap, "unit": "1"})
        rows.append({"quantity": f"telescoped_remainder_K{K}", "value": rem, "unit": "1"})
    return rows, {"constants": str(cfg.constants) if cfg.constants else "default"}, EXIT_OK


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    if len(xs) < 3 or np.any(ys <= 0):
        raise ValueError("slope fit needs at least 3 positive points")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def convergence_table(cfg: RunConfig):
    """Rows of the commutative-limit and truncation studies, plus a pass flag."""
    rows = []
    lo, hi = cfg.lambda_range
    lams = np.geomspace(lo, hi, cfg.points)
    shifts = [energy_shift(1, lam) for lam in lams]
    rows.append({"section": "limit", "n": 1, "lambda": 0.0, "n_max": "", "quantity": "shift", "value": energy_shift(1, 0.0)})
    for lam, s in zip(lams, shifts):
        rows.append({"section": "limit", "n": 1, "lambda": lam, "n_max": "", "quantity": "shift", "value": s})
    slope = loglog_slope(lams, shifts)
    rows.append({"section": "limit", "n": 1, "lambda": "", "n_max": "", "quantity": "slope", "value": slope})
    for n in (1, 2, 4, 8, 16, 32, 64):
        ratio = bound_energy(n, cfg.lam).energy / float(commutative_energy(n))
        rows.append({"section": "quasiclassical", "n": n, "lambda": cfg.lam, "n_max": "", "quantity": "E_ratio", "value": ratio})

    monotone = True
    if cfg.lam > 0:
        ns = cfg.ns(3)
        prev = {}
        for d in range(cfg.doublings + 1):
            n_max = cfg.n_max * 2**d
            sols = _numeric_energies(cfg.j, cfg.lam, n_max)
            for n in ns:
                k = n - cfg.j - 1
                E_a = bound_energy(n, cfg.lam).energy
                err = abs(-0.5 * sols[k].kappa2 - E_a) / abs(E_a) if k < len(sols) else math.nan
                rows.append({"section": "truncation", "n": n, "lambda": cfg.lam, "n_max": n_max, "quantity": "rel_err", "value": err})
                # improvement is only required above the rounding floor
                if n in prev and prev[n] > 1e-12 and not err < prev[n]:
                    monotone = False
                prev[n] = err
    rows.append({"section": "truncation", "n": "", "lambda": cfg.lam, "n_max": "", "quantity": "monotone", "value": monotone})
    return rows, slope, monotone


def cmd_convergence(cfg: RunConfig):
    """Commutative-limit slope and truncation study."""
    try:
        rows, slope, monotone = convergence_table(cfg)
    except ValueError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return [], {}, EXIT_FAIL
    meta = {"j": cfg.j, "lambda": cfg.lam, "n_max0": cfg.n_max, "slope": slope}
    return rows, meta, EXIT_OK if monotone else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "lambda0": cmd_lambda0,
    "convergence": cmd_convergence,
}


# -- argument parsing -------------------------------------------------------


def _parse_n(text: str):
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return int(lo), int(hi)
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n expects an integer or lo:hi, got {text!r}") from None
    return v, v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nchydrogen", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=COMMANDS[name].__doc__.split("\n")[0] if COMMANDS[name].__doc__ else None)
        p.add_argument("--lambda", dest="lam", type=float, default=None, help="length scale in Bohr radii")
        p.add_argument("--j", type=int, default=0, help="angular momentum sector")
        p.add_argument("--n", type=_parse_n, default=None, help="principal quantum number or range lo:hi")
        p.add_argument("--nmax", type=int, default=None, help="Fock-space truncation level")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
        p.add_argument("--constants", type=Path, default=None, help="key = value file of SI constants")
        p.add_argument("--exact", action="store_true", help="rational arithmetic for the identity suites")
        p.add_argument("--rtol", type=float, default=1e-12, help="relative tolerance of float identity checks")
        if name == "convergence":
            p.add_argument("--lambda-min", type=float, default=1e-4)
            p.add_argument("--lambda-max", type=float, default=1e-2)
            p.add_argument("--points", type=int, default=9)
            p.add_argument("--doublings", type=int, default=4)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cmd = args.command
    lam = args.lam if args.lam is not None else DEFAULT_LAMBDA.get(cmd, 0.1)
    n_max = args.nmax if args.nmax is not None else DEFAULT_NMAX.get(cmd, 800)
    extra = {}
    if cmd == "convergence":
        extra = dict(lambda_range=(args.lambda_min, args.lambda_max), points=args.points, doublings=args.doublings)
    return RunConfig(
        command=cmd,
        lam=lam,
        j=args.j,
        n_max=n_max,
        n_range=args.n,
        fmt=args.fmt,
        out=args.out,
        constants=args.constants,
        exact=args.exact,
        rtol=args.rtol,
        **extra,
    ).validate()


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute a validated config; returns ``(rendered output, exit code)``."""
    rows, meta, code = COMMANDS[cfg.command](cfg)
    return render(cfg.command, rows, cfg.fmt, meta), code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        text, code = run(cfg)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # malformed constants file and similar input errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.out is not None:
        cfg.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
