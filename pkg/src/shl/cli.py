"""Batch front end: run the verification suites and emit tables + reports.

Subcommands
    tightness     exact OU divergence vs the discrete bound over a grid
    schedule      optimal shift schedule (discrete or continuous) + cost checks
    bounds-table  the closed-form constants plus duality cross-checks
    fpverify      PDE-backed SRT / Harnack / LGE verification for a potential
    score         score sub-Gaussianity and norm-tail experiment
    coupling      finite-space composition rule and convexity-upgrade checks
    dualsd        generalized convolution lemma on random Gaussian instances

Every run writes <out>.csv (table) and <out>.json (report with fields
command, params, checks, seed, version; canonical float formatting, so
identical config + seed reproduces identical bytes) and, unless
--no-figures, PNG figures next to them.  Exit status: 0 all checks passed,
1 some check failed (the failing instances are in the report), 2 invalid
configuration.  Config files hold key=value lines; explicit flags win.
Parameter sweeps fan out over a thread pool capped by SHL_THREADS.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import __version__
from .bounds import (
    continuous_srt_bound,
    discrete_srt_bound,
    harnack_from_renyi,
    renyi_from_harnack,
    theorem1_constants,
)
from .coupling import (
    DiscreteMeasure,
    convexity_upgrade,
    mixture_renyi_quadrature_1d,
    verify_shifted_composition_finite,
)
from .expr import PotentialSyntaxError, parse_potential
from .fokker_planck import (
    default_grid,
    renyi_shift_quadrature,
    solve_transition_density,
    verify_lge_and_harnack,
    verify_srt,
)
from .gaussian_info import GaussianMeasure, renyi_gaussian_shared_cov, translate
from .kernels import ou_discrete_marginal
from .report import CheckResult, save_line_figure, write_csv, write_json
from .sampler import (
    gaussian_potential,
    potential_from_1d,
    sample_pi,
    score_mgf_check,
    score_norm_tail,
    worker_count,
)
from .schedules import (
    brute_force_schedule,
    continuous_cost,
    continuous_schedule_sinh,
    discrete_cost,
    optimal_discrete_cost,
    optimal_discrete_schedule,
)
from .shifted_div import verify_convolution_lemma

__all__ = ["ExperimentConfig", "ConfigError", "run", "entry", "main"]


class ConfigError(Exception):
    """Invalid configuration; maps to exit status 2."""


def _float(s) -> float:
    return float(s)


def _int(s) -> int:
    return int(str(s), 10)


def _float_list(s) -> list:
    toks = [t.strip() for t in str(s).split(",") if t.strip()]
    if not toks:
        raise ValueError("empty list")
    return [float(t) for t in toks]


def _int_list(s) -> list:
    toks = [t.strip() for t in str(s).split(",") if t.strip()]
    if not toks:
        raise ValueError("empty list")
    return [int(t, 10) for t in toks]


def _str(s) -> str:
    return str(s)


_OPTIONAL = object()  # default marker: parameter may stay unset (resolves to None)

# name -> (converter, default, help)
_SCHEMAS = {
    "tightness": {
        "L": (_float_list, [1.0], "drift slopes, comma separated"),
        "h": (_float_list, [0.1], "step sizes"),
        "N": (_int_list, [2], "step counts"),
        "q": (_float_list, [2.0], "Renyi orders >= 1"),
        "v": (_float_list, [1.0], "shift sizes"),
    },
    "schedule": {
        "mode": (_str, "discrete", "discrete or continuous"),
        "c1": (_float, 1.0, "position cost coefficient (discrete mode)"),
        "c2": (_float, 2.0, "increment cost coefficient (discrete mode)"),
        "N": (_int, 2, "number of steps (discrete mode)"),
        "L": (_float, 1.0, "drift slope (continuous mode)"),
        "T": (_float, 1.0, "horizon (continuous mode)"),
    },
    "bounds-table": {
        "beta": (_float, 1.0, "smoothness level"),
        "q": (_float_list, [1.0, 2.0, 4.0], "Renyi orders"),
        "t": (_float_list, [0.5, 1.0, math.inf], "times (inf = stationary)"),
        "v": (_float, 1.0, "shift size"),
    },
    "fpverify": {
        "potential": (_str, "x^2/2", "potential expression in x"),
        "beta": (_float, _OPTIONAL, "smoothness level (omit to sample |V''|)"),
        "x0": (_float, 0.0, "initial point"),
        "t": (_float, 1.0, "time"),
        "v": (_float, 0.5, "shift"),
        "q": (_float_list, [1.0], "Renyi orders for the SRT check"),
        "modes": (_str, "srt", "comma list from srt,sh_p,sh_log,lge or 'all'"),
        "p": (_float, 2.0, "Harnack order for sh_p"),
        "n-points": (_int, 4096, "grid resolution"),
    },
    "score": {
        "beta": (_float, 1.0, "smoothness level"),
        "d": (_int, 1, "dimension (Gaussian target only)"),
        "n": (_int, 100000, "sample count"),
        "potential": (_str, "", "1D potential expression (empty = Gaussian target)"),
        "lambdas": (_float_list, [-1.0, -0.5, 0.5, 1.0], "MGF evaluation points"),
        "deltas": (_float_list, [0.5, 0.1, 0.01], "tail levels"),
    },
    "coupling": {
        "kind": (_str, "both", "composition, convexity or both"),
        "instances": (_int, 20, "random instances per kind"),
        "size": (_int, 3, "state-space size for composition instances"),
        "q": (_float_list, [1.0, 2.0], "Renyi orders"),
    },
    "dualsd": {
        "instances": (_int, 100, "random instances"),
        "q": (_float_list, [1.0, 2.0], "Renyi orders"),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    parameters: dict
    output_path: str
    seed: int = 0
    figures: bool = True

    def __post_init__(self):
        if self.command not in _SCHEMAS:
            raise ConfigError(f"unknown command {self.command!r}")
        schema = _SCHEMAS[self.command]
        unknown = set(self.parameters) - set(schema)
        if unknown:
            raise ConfigError(f"unknown parameter(s) for {self.command}: {sorted(unknown)}")
        filled = dict(self.parameters)
        for name, (_, default, _help) in schema.items():
            if name not in filled:
                filled[name] = None if default is _OPTIONAL else default
        object.__setattr__(self, "parameters", filled)


@dataclass
class _Outcome:
    checks: list = field(default_factory=list)
    header: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    figure: Optional[Callable[[str], list]] = None


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, "g")
    return str(x)


def _parallel_map(fn, cells):
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(fn, cells))


# ---------------------------------------------------------------- commands


def _run_tightness(params: dict, seed: int) -> _Outcome:
    Ls, hs, Ns, qs, vs = params["L"], params["h"], params["N"], params["q"], params["v"]
    for L in Ls:
        if L < 0:
            raise ConfigError("L must be >= 0")
        for h in hs:
            if h <= 0 or (L > 0 and h >= 1.0 / L):
                raise ConfigError(f"need 0 < h < 1/L; got h = {h}, L = {L}")
    cells = sorted(itertools.product(Ls, hs, Ns, qs, vs))

    def cell(args):
        L, h, N, q, v = args
        marginal = ou_discrete_marginal(L, h, N, x=np.zeros(1))
        exact = renyi_gaussian_shared_cov(translate(marginal, np.array([v])), marginal, q)
        bound = discrete_srt_bound(q, L, 2.0, h, N, v).value
        rel = abs(exact - bound) / max(abs(bound), 1e-300)
        name = f"srt[L={_fmt(L)},h={_fmt(h)},N={N},q={_fmt(q)},v={_fmt(v)}]"
        return (L, h, N, q, v, exact, bound, rel), CheckResult(name, exact, bound, rel <= 1e-10)

    results = _parallel_map(cell, cells)
    out = _Outcome()
    out.header = ["L", "h", "N", "q", "v", "exact", "bound", "rel_err"]
    out.rows = [r for r, _ in results]
    out.checks = [c for _, c in results]

    def figure(prefix):
        idx = list(range(len(out.rows)))
        rels = [max(r[7], 1e-18) for r in out.rows]
        path = f"{prefix}_relerr.png"
        save_line_figure(path, [("relative error", idx, rels, "o-")],
                         title="OU tightness: |exact - bound| / bound",
                         xlabel="instance", ylabel="relative error", logy=True)
        return [path]

    out.figure = figure
    return out


def _run_schedule(params: dict, seed: int) -> _Outcome:
    mode = params["mode"]
    out = _Outcome()
    if mode == "discrete":
        c1, c2, N = params["c1"], params["c2"], params["N"]
        try:
            sched = optimal_discrete_schedule(c1, c2, N)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        cost = discrete_cost(sched, c1, c2)
        closed = optimal_discrete_cost(c1, c2, N)
        out.header = ["n", "a_n"]
        out.rows = [(n, float(a)) for n, a in enumerate(sched.values)]
        out.checks.append(CheckResult("cost_matches_closed_form", cost, closed,
                                      abs(cost - closed) <= 1e-10 * max(1.0, abs(closed))))
        if N <= 16:
            gap = float(np.max(np.abs(sched.values - brute_force_schedule(c1, c2, N).values)))
            out.checks.append(CheckResult("matches_bruteforce_oracle", gap, 1e-8, gap <= 1e-8))
        out.extras["cost"] = cost

        def figure(prefix):
            path = f"{prefix}_schedule.png"
            ns = list(range(N + 1))
            save_line_figure(path, [(f"c1={_fmt(c1)}, c2={_fmt(c2)}", ns, list(sched.values), "o-")],
                             title="optimal discrete shift schedule",
                             xlabel="step n", ylabel="a_n")
            return [path]

        out.figure = figure
        return out
    if mode == "continuous":
        L, T = params["L"], params["T"]
        if L <= 0 or T <= 0:
            raise ConfigError("continuous mode needs L > 0 and T > 0")
        sched = continuous_schedule_sinh(L, T)
        cost = continuous_cost(sched, L)
        closed = 2.0 * L / -math.expm1(-2.0 * L * T)
        ts = np.linspace(0.0, T, 201)
        out.header = ["t", "a_t"]
        out.rows = [(float(t), float(a)) for t, a in zip(ts, sched.value(ts))]
        out.checks.append(CheckResult("cost_matches_closed_form", cost, closed,
                                      abs(cost - closed) <= 1e-8 * max(1.0, abs(closed))))
        out.extras["cost"] = cost

        def figure(prefix):
            path = f"{prefix}_schedule.png"
            save_line_figure(path, [(f"sinh, L={_fmt(L)}", [r[0] for r in out.rows],
                                     [r[1] for r in out.rows])],
                             title="optimal continuous shift schedule",
                             xlabel="t", ylabel="a_t")
            return [path]

        out.figure = figure
        return out
    raise ConfigError(f"unknown schedule mode {mode!r}")


def _run_bounds_table(params: dict, seed: int) -> _Outcome:
    beta, qs, ts, v = params["beta"], params["q"], params["t"], params["v"]
    if beta <= 0:
        raise ConfigError("beta must be > 0")
    if any(t <= 0 for t in ts):
        raise ConfigError("times must be > 0 (use inf for the stationary row)")
    out = _Outcome()
    out.header = ["kind", "order", "t", "norm_v", "value"]
    for t in sorted(ts):
        out.rows.append(("LGE", "", t, "", theorem1_constants("LGE", beta, t).value))
        out.rows.append(("SH_log", "", t, v, theorem1_constants("SH_log", beta, t, norm_v=v).value))
        out.rows.append(("SRT_1", "", t, v, theorem1_constants("SRT_1", beta, t, norm_v=v).value))
        for q in sorted(qs):
            srt = theorem1_constants("SRT_q", beta, t, q=q, norm_v=v).value
            out.rows.append(("SRT_q", q, t, v, srt))
            if q > 1.0:
                p = q / (q - 1.0)
                shp = theorem1_constants("SH_p", beta, t, p=p, norm_v=v).value
                out.rows.append(("SH_p", p, t, v, shp))
                name = f"duality[q={_fmt(q)},t={_fmt(t)}]"
                out.checks.append(CheckResult(name, shp, srt,
                                              abs(shp - srt) <= 1e-12 * max(1.0, srt)))
                rt = renyi_from_harnack(q, harnack_from_renyi(q, srt))
                out.checks.append(CheckResult(f"harnack_roundtrip[q={_fmt(q)},t={_fmt(t)}]",
                                              rt, srt, abs(rt - srt) <= 1e-12 * max(1.0, srt)))
            cont = continuous_srt_bound(q, L=beta, lam=2.0, T=t, norm_v=v).value
            out.checks.append(CheckResult(f"langevin_consistency[q={_fmt(q)},t={_fmt(t)}]",
                                          cont, srt, abs(cont - srt) <= 1e-12 * max(1.0, srt)))

    def figure(prefix):
        grid = np.linspace(0.05, 3.0, 200)
        curves = [
            ("LGE", grid, [theorem1_constants("LGE", beta, t).value for t in grid]),
            ("SRT_1", grid, [theorem1_constants("SRT_1", beta, t, norm_v=v).value for t in grid]),
        ]
        for q in sorted(qs):
            if q > 1.0:
                curves.append((f"SRT_{_fmt(q)}", grid,
                               [theorem1_constants("SRT_q", beta, t, q=q, norm_v=v).value
                                for t in grid]))
        path = f"{prefix}_constants.png"
        save_line_figure(path, curves, title=f"regularity constants, beta={_fmt(beta)}",
                         xlabel="t", ylabel="constant", logy=True)
        return [path]

    out.figure = figure
    return out


def _run_fpverify(params: dict, seed: int) -> _Outcome:
    try:
        pot = parse_potential(params["potential"], params["beta"])
    except (PotentialSyntaxError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    x0, t, v, p_order = params["x0"], params["t"], params["v"], params["p"]
    if t <= 0:
        raise ConfigError("t must be > 0")
    n_points = params["n-points"]
    if n_points < 128:
        raise ConfigError("n-points must be >= 128")
    modes_raw = params["modes"].strip().lower()
    modes = ["srt", "sh_p", "sh_log", "lge"] if modes_raw == "all" else [
        m.strip() for m in modes_raw.split(",") if m.strip()
    ]
    known = {"srt", "sh_p", "sh_log", "lge"}
    if not modes or set(modes) - known:
        raise ConfigError(f"modes must come from {sorted(known)} or 'all'")

    grid = default_grid(x0, pot.beta, n_points)
    field_ = solve_transition_density(pot, x0, t, grid)

    def test_fn(y):
        return np.exp(0.3 * np.asarray(y))

    def test_fn_deriv(y):
        return 0.3 * np.exp(0.3 * np.asarray(y))

    out = _Outcome()
    for mode in modes:
        if mode == "srt":
            for q in params["q"]:
                rep = verify_srt(pot, x0, v, t, q, grid)
                out.checks.append(CheckResult(f"srt[q={_fmt(q)}]", rep.lhs, rep.rhs, rep.passed))
        elif mode == "sh_p":
            rep = verify_lge_and_harnack(pot, x0, t, test_fn, "SH_p", v=v, p=p_order, grid=grid)
            out.checks.append(CheckResult(f"sh_p[p={_fmt(p_order)}]", rep.lhs, rep.rhs, rep.passed))
        elif mode == "sh_log":
            rep = verify_lge_and_harnack(pot, x0, t, test_fn, "SH_log", v=v, grid=grid)
            out.checks.append(CheckResult("sh_log", rep.lhs, rep.rhs, rep.passed))
        else:
            rep = verify_lge_and_harnack(pot, x0, t, test_fn, "LGE", df=test_fn_deriv, grid=grid)
            out.checks.append(CheckResult("lge", rep.lhs, rep.rhs, rep.passed))

    xs = grid.xs
    out.header = ["x", "density"]
    out.rows = [(float(x), float(pv)) for x, pv in zip(xs, field_.values)]
    out.extras["beta"] = pot.beta

    def figure(prefix):
        path = f"{prefix}_density.png"
        shifted = np.interp(xs - v, xs, field_.values, left=0.0, right=0.0)
        save_line_figure(path,
                         [("p_t", xs, field_.values), (f"p_t shifted by {_fmt(v)}", xs, shifted, "--")],
                         title=f"transition density, t={_fmt(t)}", xlabel="x", ylabel="density")
        return [path]

    out.figure = figure
    return out


def _run_score(params: dict, seed: int) -> _Outcome:
    beta, d, n = params["beta"], params["d"], params["n"]
    if beta <= 0 or d < 1 or n < 1:
        raise ConfigError("need beta > 0, d >= 1, n >= 1")
    if params["potential"]:
        if d != 1:
            raise ConfigError("a potential expression implies d = 1")
        try:
            target = potential_from_1d(parse_potential(params["potential"], beta))
        except (PotentialSyntaxError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        method = "inverse_cdf_1d"
    else:
        target = gaussian_potential(beta)
        method = "exact_gaussian"
    S = sample_pi(target, d, n, seed, method)
    e = np.zeros(d)
    e[0] = 1.0
    rows_mgf = score_mgf_check(S, target, e, beta, params["lambdas"])
    tail = score_norm_tail(S, target, beta, params["deltas"])

    out = _Outcome()
    out.header = ["lambda", "empirical", "bound", "stderr"]
    for r in rows_mgf:
        out.rows.append((r.lam, r.empirical, r.bound, r.stderr))
        out.checks.append(CheckResult(f"mgf[lam={_fmt(r.lam)}]", r.empirical,
                                      r.bound + 3.0 * r.stderr, r.passed))
    scores = target.grad(S.samples) @ e
    mean_abs = float(abs(scores.mean()))
    mean_tol = 4.0 * float(scores.std(ddof=1)) / math.sqrt(S.n)
    out.checks.append(CheckResult("score_mean_near_zero", mean_abs, mean_tol, mean_abs <= mean_tol))
    out.extras["tail"] = {
        "fitted_C": tail.fitted_C,
        "rows": [{"delta": r.delta, "quantile": r.quantile, "shape": r.shape, "ratio": r.ratio}
                 for r in tail.rows],
    }
    out.extras["method"] = S.method
    if S.info:
        out.extras["sampler_info"] = S.info

    def figure(prefix):
        lams = [r.lam for r in rows_mgf]
        path = f"{prefix}_mgf.png"
        save_line_figure(path,
                         [("empirical", lams, [r.empirical for r in rows_mgf], "o"),
                          ("bound exp(lam^2 beta/2)", lams, [r.bound for r in rows_mgf], "-")],
                         title=f"score MGF along e_1, beta={_fmt(beta)}, d={d}",
                         xlabel="lambda", ylabel="MGF")
        return [path]

    out.figure = figure
    return out


def _run_coupling(params: dict, seed: int) -> _Outcome:
    kind = params["kind"]
    if kind not in ("composition", "convexity", "both"):
        raise ConfigError("kind must be composition, convexity or both")
    k = params["size"]
    if not 2 <= k <= 6:
        raise ConfigError("size must lie in 2..6")
    n_inst = params["instances"]
    if n_inst < 1:
        raise ConfigError("instances must be >= 1")
    qs = sorted(params["q"])
    rng = np.random.default_rng(seed)
    out = _Outcome()
    out.header = ["kind", "instance", "q", "lhs", "rhs", "margin"]

    if kind in ("composition", "both"):
        for i in range(n_inst):
            jm = rng.dirichlet(np.ones(k * k)).reshape(k, k)
            jn = rng.dirichlet(np.ones(k * k)).reshape(k, k)
            for q in qs:
                rep = verify_shifted_composition_finite(jm, jn, q)
                out.rows.append(("composition", i, q, rep.lhs, rep.rhs, rep.margin))
                out.checks.append(CheckResult(f"composition[i={i},q={_fmt(q)}]",
                                              rep.lhs, rep.rhs, rep.passed))

    if kind in ("convexity", "both"):
        h, L, lam = 0.1, 1.0, 2.0
        r = 1.0 - L * h
        for i in range(n_inst):
            x0 = rng.uniform(-1.0, 1.0)
            mean = r * x0
            var = 2.0 * h
            atoms = rng.uniform(-1.0, 1.0, size=rng.integers(2, 5))
            atoms_p = rng.uniform(-1.0, 1.0, size=rng.integers(2, 5))
            nu = DiscreteMeasure(atoms, rng.dirichlet(np.ones(atoms.size)))
            nu_p = DiscreteMeasure(atoms_p, rng.dirichlet(np.ones(atoms_p.size)))
            for q in qs:
                rho = lambda u, q=q: q * float(u @ u) / (2.0 * lam * h)
                rhs = convexity_upgrade(rho, q, nu, nu_p)
                lhs = mixture_renyi_quadrature_1d(mean + nu.atoms[:, 0], nu.weights,
                                                  mean + nu_p.atoms[:, 0], nu_p.weights,
                                                  var, q)
                out.rows.append(("convexity", i, q, lhs, rhs, rhs - lhs))
                out.checks.append(CheckResult(f"convexity[i={i},q={_fmt(q)}]", lhs, rhs,
                                              lhs <= rhs + 1e-6 * max(1.0, abs(rhs))))

    def figure(prefix):
        idx = list(range(len(out.rows)))
        margins = [max(r[5], 1e-18) for r in out.rows]
        path = f"{prefix}_margins.png"
        save_line_figure(path, [("rhs - lhs", idx, margins, "o")],
                         title="coupling verifications: margin per instance",
                         xlabel="instance", ylabel="margin", logy=True)
        return [path]

    out.figure = figure
    return out


def _run_dualsd(params: dict, seed: int) -> _Outcome:
    n_inst = params["instances"]
    if n_inst < 1:
        raise ConfigError("instances must be >= 1")
    qs = sorted(params["q"])
    rng = np.random.default_rng(seed)
    out = _Outcome()
    out.header = ["instance", "q", "case", "z", "a", "lhs", "rhs", "margin"]

    for i in range(n_inst):
        d = int(rng.integers(1, 4))
        s2 = float(rng.uniform(0.2, 2.0))
        xi_var = float(rng.uniform(0.2, 2.0))
        mu = GaussianMeasure.isotropic(rng.normal(size=d), s2)
        nu = GaussianMeasure.isotropic(rng.normal(size=d), s2)
        xi = GaussianMeasure.isotropic(np.zeros(d), xi_var)
        # cycle through the four proof-case quadrants
        mag = float(rng.uniform(0.1, 1.5))
        z = mag if i % 2 == 0 else -mag
        a = float(rng.uniform(0.0, mag)) if (i // 2) % 2 == 0 else mag + float(rng.uniform(0.0, 1.0))
        for q in qs:
            rep = verify_convolution_lemma(mu, nu, xi, z, a, q)
            out.rows.append((i, q, rep.case, z, a, rep.lhs, rep.rhs, rep.margin))
            out.checks.append(CheckResult(f"conv[i={i},q={_fmt(q)},{rep.case}]",
                                          rep.lhs, rep.rhs, rep.passed))

    def figure(prefix):
        lhs = [r[5] for r in out.rows]
        rhs = [r[6] for r in out.rows]
        top = max(rhs + [1.0])
        path = f"{prefix}_lemma.png"
        save_line_figure(path, [("instances", lhs, rhs, "o"), ("lhs = rhs", [0, top], [0, top], "--")],
                         title="convolution lemma: rhs vs lhs", xlabel="lhs", ylabel="rhs")
        return [path]

    out.figure = figure
    return out


_RUNNERS = {
    "tightness": _run_tightness,
    "schedule": _run_schedule,
    "bounds-table": _run_bounds_table,
    "fpverify": _run_fpverify,
    "score": _run_score,
    "coupling": _run_coupling,
    "dualsd": _run_dualsd,
}


# ------------------------------------------------------------ orchestration


def run(config: ExperimentConfig) -> int:
    """Execute a configured command; returns the process exit status."""
    outcome = _RUNNERS[config.command](config.parameters, config.seed)
    prefix = config.output_path
    write_csv(f"{prefix}.csv", outcome.header, outcome.rows)
    report = {
        "command": config.command,
        "params": _jsonable(config.parameters),
        "checks": [c.row() for c in outcome.checks],
        "seed": config.seed,
        "version": __version__,
    }
    if outcome.extras:
        report["extras"] = _jsonable(outcome.extras)
    write_json(f"{prefix}.json", report)
    paths = [f"{prefix}.csv", f"{prefix}.json"]
    if config.figures and outcome.figure is not None:
        paths.extend(outcome.figure(prefix))
    for c in outcome.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: lhs={c.lhs:.12g} rhs={c.rhs:.12g} margin={c.margin:.6g}")
    print("wrote " + " ".join(paths))
    failed = [c for c in outcome.checks if not c.passed]
    if failed:
        print(f"{len(failed)} check(s) failed; see {prefix}.json", file=sys.stderr)
        return 1
    return 0


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, bool, int, float)) or obj is None:
        return obj
    if isinstance(obj, np.generic):
        return obj.item()
    return str(obj)


def _read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
                key, val = line.split("=", 1)
                out[key.strip()] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shl",
        description="Sharp forward-regularity bounds for Ito diffusions: verification suites.",
    )
    parser.add_argument("--version", action="version", version=f"shl {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for cmd, schema in _SCHEMAS.items():
        p = sub.add_parser(cmd, help=f"run the {cmd} suite")
        for name, (_, default, help_) in schema.items():
            suffix = "" if default is _OPTIONAL else f" (default {default})"
            p.add_argument(f"--{name}", default=None, metavar="X", help=help_ + suffix)
        p.add_argument("--seed", default=None, metavar="S", help="RNG seed (default 0)")
        p.add_argument("--out", default=None, metavar="PREFIX",
                       help="output path prefix (default shl_<command>)")
        p.add_argument("--config", default=None, metavar="FILE",
                       help="key=value config file; explicit flags win")
        p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    return parser


def _resolve(args: argparse.Namespace) -> ExperimentConfig:
    schema = _SCHEMAS[args.command]
    file_values = _read_config_file(args.config) if args.config else {}
    unknown = set(file_values) - set(schema) - {"seed", "out"}
    if unknown:
        raise ConfigError(f"config file sets unknown key(s): {sorted(unknown)}")
    params = {}
    for name, (conv, default, _help) in schema.items():
        raw = getattr(args, name.replace("-", "_"))
        if raw is None:
            raw = file_values.get(name)
        if raw is None:
            params[name] = None if default is _OPTIONAL else default
        else:
            try:
                params[name] = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for --{name}: {exc}") from None
    seed_raw = args.seed if args.seed is not None else file_values.get("seed", "0")
    try:
        seed = int(str(seed_raw), 10)
    except ValueError:
        raise ConfigError(f"bad seed {seed_raw!r}") from None
    out = args.out if args.out is not None else file_values.get("out", f"shl_{args.command}")
    return ExperimentConfig(args.command, params, out, seed, not args.no_figures)


def entry(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        config = _resolve(args)
        return run(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(entry())


if __name__ == "__main__":
    main()
