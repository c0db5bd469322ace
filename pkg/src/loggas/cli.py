"""Command-line front end.

Every subcommand writes a CSV table (header row, floats as ``%.17g``) to
``--out`` or stdout; ``--json`` writes a RunEnvelope document instead.
Conventions worth knowing at the shell:

* Jacobi weight is (1 - x)^a (1 + x)^b.
* Dense GUE has E|M_ij|^2 = 1 off the diagonal and unit diagonal variance;
  ``--scale`` divides eigenvalues by sqrt(N), filling [-2, 2].
* The X1 Laguerre family starts at n = 1 (degree 1 in t = x^2).
* ``mcmc --steps`` counts sweeps of N single-site proposals.

Exit codes: 0 ok, 1 usage, 2 convergence or sampler diagnostics out of
contract, 3 domain/parameter error. Errors go to stderr as
``error: <code>: <message>``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .electrostatics import Superpotential, equilibrium_superpotential, residual, solve_equilibrium, _auto_init
from .errors import ConvergenceError, IntegrationError, LogGasError
from .numerics import RandomStream
from .orthopoly import OrthogonalFamily, family_polynomial, zeros
from .qhj import contour_quantization, polynomial_spectrum, schrodinger_spectrum, susy_partners
from .rmt import (ENSEMBLE_BETA, EnsembleSpec, dyson_flow, ks_distance, log_jpdf, metropolis_sample,
                  sample_gaussian_ensemble, sample_replicas, sample_tridiagonal_beta, semicircle_cdf)
from .xpoly import (ExceptionalLaguerreFamily, check_residues, deformed_weight, exceptional_log_jpdf,
                    exceptional_qmf, gram_matrix, isospectral_check, level, scalar_log_weight)

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_DOMAIN = 0, 1, 2, 3
ACCEPTANCE_BAND = (0.1, 0.9)


class UsageError(Exception):
    code = "usage"


class OutOfContract(Exception):
    """Results were produced but a diagnostic is outside its contract."""

    code = "convergence"


class OutOfDomain(LogGasError, ValueError):
    code = "invalid-input"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunEnvelope:
    command: str
    params: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        doc = {"command": self.command, "params": self.params,
               "results": self.results, "diagnostics": self.diagnostics}
        return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        missing = {"command", "params", "results", "diagnostics"} - set(doc)
        if missing:
            raise ValueError(f"envelope lacks {sorted(missing)}")
        return cls(doc["command"], doc["params"], doc["results"], doc["diagnostics"])


@dataclass
class Table:
    header: list
    rows: list

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()

    def records(self):
        return [{h: _plain(v) for h, v in zip(self.header, row)} for row in self.rows]


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _family(args):
    if args.family == "hermite":
        return OrthogonalFamily.hermite()
    if args.family == "laguerre":
        return OrthogonalFamily.laguerre(args.alpha)
    return OrthogonalFamily.jacobi(args.a, args.b)


def _oscillator_field(omega):
    if not omega > 0:
        raise OutOfDomain("omega must be positive")
    return Superpotential(linear=0.5 * omega)


def _read_points(path):
    values = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            for cell in row:
                cell = cell.strip()
                if not cell:
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    if values:
                        raise OutOfDomain(f"non-numeric entry {cell!r} in {path}")
    if not values:
        raise OutOfDomain(f"no points in {path}")
    return np.array(values)


# ---------------------------------------------------------------------------
# subcommands: each returns (Table, results dict, diagnostics dict)
# ---------------------------------------------------------------------------

def cmd_zeros(args):
    fam = _family(args)
    W = equilibrium_superpotential(fam)
    diag = {"family": str(fam)}
    cols = {}
    if args.method in ("eig", "both"):
        cols["eig"] = np.asarray(zeros(fam, args.n))
    if args.method in ("equilibrium", "both"):
        res = solve_equilibrium(args.n, W)
        cols["equilibrium"] = np.asarray(res.points)
        diag.update(residual_norm=res.residual_norm, iterations=res.iterations, converged=res.converged)
    header = ["index"] + list(cols)
    rows = [[k] + [c[k] for c in cols.values()] for k in range(args.n)]
    results = {"zeros": {k: v.tolist() for k, v in cols.items()}}
    if args.method == "both":
        d = float(np.max(np.abs(cols["eig"] - cols["equilibrium"])))
        results["max_discrepancy"] = d
    table = Table(header, rows)
    if "converged" in diag and not diag["converged"]:
        raise OutOfContract("equilibrium solve did not converge", table, results, diag)
    return table, results, diag


def cmd_equilibrium(args):
    fam = _family(args)
    res = solve_equilibrium(args.n, equilibrium_superpotential(fam), tol=args.tol, max_iter=args.max_iter)
    x = np.asarray(res.points)
    table = Table(["index", "x"], [[k, v] for k, v in enumerate(x)])
    results = {"points": x.tolist()}
    diag = {"family": str(fam), "residual_norm": res.residual_norm,
            "iterations": res.iterations, "converged": res.converged,
            "newton_steps": res.steps.count("newton"), "gradient_steps": res.steps.count("gradient")}
    if not res.converged:
        raise OutOfContract(f"residual {res.residual_norm:.3g} above tol after {res.iterations} iterations",
                            table, results, diag)
    return table, results, diag


def cmd_qhj_spectrum(args):
    W = _oscillator_field(args.omega)
    states = polynomial_spectrum(W, args.nmax)
    width = args.nmax + 1
    rows = []
    for st in states:
        c = list(st.f.coeffs) + [0.0] * (width - len(st.f.coeffs))
        rows.append([st.n, st.lambda_] + c)
    header = ["n", "lambda"] + [f"c{k}" for k in range(width)]
    results = {"lambda": [st.lambda_ for st in states],
               "coefficients": [list(st.f.coeffs) for st in states]}
    return Table(header, rows), results, {"superpotential": f"{0.5 * args.omega!r}*x"}


def cmd_quantize(args):
    fam = _family(args)
    J = contour_quantization(family_polynomial(fam, args.n), equilibrium_superpotential(fam))
    return Table(["n", "J"], [[args.n, J]]), {"n": args.n, "J": J}, {"family": str(fam),
                                                                   "error": abs(J - args.n)}


def cmd_susy(args):
    W = _oscillator_field(args.omega)
    v_plus, v_minus = susy_partners(W)
    half = args.half_width if args.half_width else 8.0 * math.sqrt(2.0 / args.omega)
    ep = schrodinger_spectrum(v_plus, (-half, half), args.grid, args.levels)
    em = schrodinger_spectrum(v_minus, (-half, half), args.grid, args.levels)
    rows = [[k, ep[k], em[k], args.omega * k, args.omega * (k + 1)] for k in range(args.levels)]
    header = ["level", "v_plus", "v_minus", "exact_plus", "exact_minus"]
    results = {"v_plus": ep.tolist(), "v_minus": em.tolist()}
    diag = {"interval": [-half, half], "grid_points": args.grid,
            "max_error_plus": float(np.max(np.abs(ep - args.omega * np.arange(args.levels)))),
            "max_partner_shift_error": float(np.max(np.abs(em[:-1] - ep[1:]))) if args.levels > 1 else 0.0}
    return Table(header, rows), results, diag


def _ensemble_draw(ensemble, beta, dim):
    if ensemble == "tridiag":
        if beta is None:
            raise OutOfDomain("tridiag needs --beta")
        return lambda s: sample_tridiagonal_beta(dim, beta, s)
    expected = ENSEMBLE_BETA[ensemble]
    if beta is not None and beta != expected:
        raise OutOfDomain(f"{ensemble} has beta={expected}, got --beta {beta:g}")
    spec = EnsembleSpec(expected, dim)
    return lambda s: sample_gaussian_ensemble(spec, s)


def _histogram(values, bins):
    counts, edges = np.histogram(values, bins=bins)
    width = np.diff(edges)
    dens = counts / (values.size * width)
    return Table(["bin_lo", "bin_hi", "count", "density"],
                 [[edges[k], edges[k + 1], int(counts[k]), dens[k]] for k in range(bins)])


def cmd_sample(args):
    draw = _ensemble_draw(args.ensemble, args.beta, args.dim)
    samples = sample_replicas(draw, args.seed, args.replicas)
    factor = 1.0 / math.sqrt(args.dim) if args.scale else 1.0
    evs = [np.asarray(s.eigenvalues) * factor for s in samples]
    results = {"eigenvalues": [e.tolist() for e in evs]}
    diag = {"method": samples[0].method, "scaled": bool(args.scale)}
    if args.bins:
        table = _histogram(np.concatenate(evs), args.bins)
        results["histogram"] = table.records()
        return table, results, diag
    rows = [[r, k, v] for r, e in enumerate(evs) for k, v in enumerate(e)]
    return Table(["replica", "index", "eigenvalue"], rows), results, diag


def cmd_semicircle(args):
    spec = EnsembleSpec(2, args.dim)
    samples = sample_replicas(lambda s: sample_gaussian_ensemble(spec, s), args.seed, args.replicas)
    pooled = np.sort(np.concatenate([np.asarray(s.eigenvalues) for s in samples]) / math.sqrt(args.dim))
    ks = ks_distance(pooled, semicircle_cdf)
    grid = np.linspace(-2.0, 2.0, args.bins + 1)
    emp = np.searchsorted(pooled, grid, side="right") / pooled.size
    table = Table(["x", "empirical_cdf", "semicircle_cdf"],
                  [[x, e, semicircle_cdf(x)] for x, e in zip(grid, emp)])
    return table, {"ks": ks, "cdf": table.records()}, {"pooled": int(pooled.size)}


def cmd_mcmc(args):
    stream = RandomStream(args.seed)
    if args.exceptional:
        fam = ExceptionalLaguerreFamily(args.g, args.l)
        half_beta = 0.5 * args.beta
        lw = scalar_log_weight(fam)

        def one_body(x):
            return half_beta * lw(x)

        spec = EnsembleSpec(args.beta, args.n)
        init = np.sqrt(np.arange(1, args.n + 1, dtype=float))
        res = metropolis_sample(spec, args.steps, args.burn_in, args.step_scale, stream, init=init,
                                one_body=one_body, support=(0.0, math.inf))
    else:
        spec = EnsembleSpec(args.beta, args.n)
        res = metropolis_sample(spec, args.steps, args.burn_in, args.step_scale, stream)
    sq = res.mean(lambda s: np.sum(s * s, axis=1))
    sorted_means = np.mean(np.sort(res.samples, axis=1), axis=0)
    rows = [["acceptance_rate", res.acceptance_rate], ["mean_sum_sq", sq]]
    rows += [[f"mean_x{k}", v] for k, v in enumerate(sorted_means)]
    table = Table(["statistic", "value"], rows)
    results = {"mean_sum_sq": sq, "mean_sorted": sorted_means.tolist()}
    diag = {"acceptance_rate": res.acceptance_rate, "kept_sweeps": int(res.samples.shape[0])}
    lo, hi = ACCEPTANCE_BAND
    if not lo < res.acceptance_rate < hi:
        raise OutOfContract(f"acceptance rate {res.acceptance_rate:.3f} outside ({lo}, {hi})",
                            table, results, diag)
    return table, results, diag


def cmd_dyson(args):
    W = Superpotential(linear=1.0)
    init = _auto_init(args.n, W, -math.inf, math.inf) * 0.5
    beta = 0.0 if args.deterministic else args.beta
    stream = None if args.deterministic else RandomStream(args.seed)
    traj = dyson_flow(init, W, beta, args.dt, args.steps, stream, record_every=args.record_every)
    final = np.asarray(traj.final)
    r = float(np.max(np.abs(residual(final, W))))
    avg = traj.time_average(lambda p: np.sum(p * p, axis=1))
    table = Table(["index", "x"], [[k, v] for k, v in enumerate(final)])
    results = {"final": final.tolist(), "time_average_sum_sq": avg}
    diag = {"residual_norm": r, "halvings": traj.halvings, "time": float(traj.times[-1])}
    return table, results, diag


def cmd_jpdf(args):
    x = _read_points(args.points)
    if args.exceptional:
        fam = ExceptionalLaguerreFamily(args.g, args.l)
        value = exceptional_log_jpdf(x, fam, args.beta)
        results = {"log_jpdf": value}
        rows = [["exceptional", value]]
    else:
        W = Superpotential(linear=1.0)
        pot = log_jpdf(x, args.beta, W, "potential")
        wt = log_jpdf(x, args.beta, W, "weight")
        results = {"log_jpdf_potential": pot, "log_jpdf_weight": wt}
        rows = [["potential", pot], ["weight", wt]]
    return Table(["form", "log_jpdf"], rows), results, {"points": int(x.size)}


def cmd_xlag(args):
    fam = ExceptionalLaguerreFamily(args.g, args.l)
    first = fam.first
    nmax = max(args.nmax, first)
    if args.what == "gram":
        G, idx = gram_matrix(fam, nmax)
        d = np.sqrt(np.diag(G))
        R = G / np.outer(d, d)
        off = float(np.max(np.abs(R - np.eye(len(idx))))) if len(idx) > 1 else 0.0
        rows = [[idx[i], idx[j], G[i, j]] for i in range(len(idx)) for j in range(len(idx))]
        return (Table(["m", "n", "value"], rows), {"gram": G.tolist(), "degrees": idx},
                {"max_offdiag_relative": off})
    if args.what == "weight":
        x = np.linspace(0.0, args.x_max, args.samples + 1)
        w = deformed_weight(x, fam)
        return (Table(["x", "weight"], [[a, b] for a, b in zip(x, w)]),
                {"x": x.tolist(), "weight": w.tolist()}, {})
    if args.what == "qmf":
        rows, worst = [], 0.0
        for n in range(first, nmax + 1):
            q = exceptional_qmf(n, fam)
            worst = max(worst, check_residues(q))
            for p in q.poles:
                loc, res = complex(p.location), complex(p.residue)
                rows.append([n, p.kind, loc.real, loc.imag, res.real, res.imag])
        header = ["n", "kind", "location_re", "location_im", "residue_re", "residue_im"]
        table = Table(header, rows)
        return table, {"catalog": table.records()}, {"max_residue_error": worst}
    grid = np.linspace(0.3, 3.0, 64)
    rows = []
    for n in range(first, nmax):
        spread, gap = isospectral_check(n, n + 1, fam, grid)
        rows.append([n, n + 1, gap, level(n + 1, fam) - level(n, fam), spread])
    table = Table(["n1", "n2", "gap", "level_gap", "spread"], rows)
    return table, {"pairs": table.records()}, {}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _add_family(p):
    p.add_argument("--family", required=True, choices=["hermite", "laguerre", "jacobi"],
                   help="Jacobi weight is (1-x)^a (1+x)^b")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)


def _add_exceptional(p):
    p.add_argument("--exceptional", action="store_true",
                   help="use the deformed X1 Laguerre weight on x > 0")
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--l", type=_nonneg_int, default=1)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--json", action="store_true", help="emit a RunEnvelope document")
    common.add_argument("--timing", action="store_true",
                        help="add wall time to diagnostics (breaks byte reproducibility)")

    parser = _Parser(prog="loggas", description="Log-gas, QHJ and random-matrix numerics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("zeros", parents=[common], help="zeros of P_n")
    _add_family(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--method", choices=["eig", "equilibrium", "both"], default="eig")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("equilibrium", parents=[common], help="Stieltjes equilibrium by damped Newton")
    _add_family(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--max-iter", type=_positive_int, default=200)
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("qhj-spectrum", parents=[common], help="polynomial bound states for W = omega x / 2")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--nmax", type=_positive_int, required=True)
    p.set_defaults(func=cmd_qhj_spectrum)

    p = sub.add_parser("quantize", parents=[common], help="contour action of the n-th state")
    _add_family(p)
    p.add_argument("--n", type=_nonneg_int, required=True)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("susy", parents=[common], help="finite-difference spectra of the SUSY partners")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--levels", type=_positive_int, required=True)
    p.add_argument("--grid", type=_positive_int, default=4000)
    p.add_argument("--half-width", type=float, default=None)
    p.set_defaults(func=cmd_susy)

    p = sub.add_parser("sample", parents=[common], help="replicated ensemble spectra")
    p.add_argument("--ensemble", required=True, choices=["goe", "gue", "gse", "tridiag"])
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--replicas", type=_positive_int, default=1)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--scale", action="store_true", help="divide eigenvalues by sqrt(dim)")
    p.add_argument("--bins", type=_positive_int, default=None, help="emit a histogram instead")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("semicircle-test", parents=[common], help="GUE KS distance to the semicircle")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--replicas", type=_positive_int, required=True)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--bins", type=_positive_int, default=40, help="CDF table resolution")
    p.set_defaults(func=cmd_semicircle)

    p = sub.add_parser("mcmc", parents=[common], help="Metropolis sampling of the log-gas density")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--burn-in", type=_nonneg_int, default=0)
    p.add_argument("--step-scale", type=float, default=None)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    _add_exceptional(p)
    p.set_defaults(func=cmd_mcmc)

    p = sub.add_parser("dyson", parents=[common], help="Dyson Brownian motion in W = x")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--deterministic", action="store_true", help="noise-free gradient flow")
    p.add_argument("--record-every", type=_positive_int, default=1)
    p.set_defaults(func=cmd_dyson)

    p = sub.add_parser("jpdf", parents=[common], help="log joint density of a configuration")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--points", required=True, help="CSV file of eigenvalues")
    _add_exceptional(p)
    p.set_defaults(func=cmd_jpdf)

    p = sub.add_parser("xlag", parents=[common], help="X1 Laguerre family (lowest member n = 1)")
    p.add_argument("what", choices=["gram", "weight", "qmf", "isospectral"])
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--l", type=_nonneg_int, required=True)
    p.add_argument("--nmax", type=_positive_int, default=6)
    p.add_argument("--x-max", type=float, default=5.0)
    p.add_argument("--samples", type=_positive_int, default=50)
    p.set_defaults(func=cmd_xlag)
    return parser


_META = {"func", "out", "json", "timing", "command"}


def _params(args):
    return {k: str(v) for k, v in sorted(vars(args).items()) if k not in _META}


def _emit(args, table, results, diag, elapsed):
    if args.timing:
        diag = dict(diag, wall_time_s=elapsed)
    diag = {k: _plain(v) for k, v in diag.items()}
    if args.json:
        text = RunEnvelope(args.command, _params(args), results, diag).to_json()
    else:
        text = table.to_csv()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(code, message, status):
    sys.stderr.write(f"error: {code}: {message}\n")
    return status


def run(argv=None):
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    start = time.perf_counter()
    try:
        table, results, diag = args.func(args)
    except OutOfContract as exc:
        message, table, results, diag = exc.args
        _emit(args, table, results, diag, time.perf_counter() - start)
        return _fail(exc.code, message, EXIT_CONVERGENCE)
    except (ConvergenceError, IntegrationError) as exc:
        return _fail(exc.code, exc, EXIT_CONVERGENCE)
    except LogGasError as exc:
        return _fail(exc.code, exc, EXIT_DOMAIN)
    except (OSError, ValueError, ArithmeticError) as exc:
        return _fail("invalid-input", exc, EXIT_DOMAIN)
    try:
        _emit(args, table, results, diag, time.perf_counter() - start)
    except OSError as exc:
        return _fail("io", exc, EXIT_DOMAIN)
    return EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
