"""Verifier sweeps for the harmonic-analysis estimates, with frozen regression baselines.

Each check returns a JSON-ready record::

    {check, params, sweep, max_ratio, baseline, baseline_limit,
     conditions, passed}

``conditions`` holds the check's own pass criteria (spread across shells,
growth across scales, positivity, slope).  A frozen baseline applies only
when the sweep parameters equal the ones it was frozen with; the check then
also requires ``max_ratio <= SLACK * baseline``.
"""

from __future__ import annotations

import copy
import json
import math
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .config import VerifySuiteConfig
from .diagnostics import potential_term_bound_check
from .hartree import kernel_bound_check, kernel_lp_bound_check, lp_exponent
from .initial_data import gaussian, modulated_gaussian, random_band_limited
from .littlewood_paley import (
    bernstein_ratio,
    dyadic_multiplier_ratio,
    j_max,
    product_estimate_ratio,
)
from .radial import gaussian_scale_sweep
from .spectral import SpectralGrid

SLACK = 1.25
BASELINE_FILE = "baselines.json"

# the shell family: a modulated Gaussian of width W0 2^-j centred at |xi| = SHELL_CENTER 2^j,
# the dilation of one profile, so the ratios are scale-invariant up to discretization
DEFAULT_SWEEPS: dict = {
    "bernstein": {
        "grid": [256, 16 * math.pi],
        "width0": 4.0,
        "shell_center": 1.64,
        "pairs": [[1, 2], [2, "inf"], [1, "inf"]],
        "max_spread": 10.0,
    },
    "dyadic_multiplier": {
        "grid": [256, 16 * math.pi],
        "width0": 4.0,
        "shell_center": 1.64,
        "s": [0.25, 0.5, 0.75],
        "b": [0.5, 1.0, 2.0],
        "p": [1, 2, "inf"],
        "max_spread": 10.0,
    },
    "product_estimate": {
        "grid": [128, 16 * math.pi],
        "s": [0.25, 0.5, 0.75],
        "members": 6,
        "k_cut": 4.0,
        "max_spread": 100.0,
    },
    "brezis_gallouet": {
        "octaves": [0, 8],
        "s": [0.25, 0.5, 0.75],
        "b": [0.5, 1.0, 2.0],
        "from_octave": 5,
        "growth_limit": 1.05,
    },
    "kernel_bound": {
        "grid": [1024, 32 * math.pi],
        "r_min": 0.1,
        "r_max": 8.0,
        "positivity_r_max": 5.0,
    },
    "kernel_lp": {
        "grid": [1024, 32 * math.pi],
        "epsilon": [0.5, 0.25, 0.125, 0.0625],
    },
    "potential_term": {
        "grid": [128, 16 * math.pi],
        "epsilon": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        "widths": [0.5, 1.0, 2.0, 4.0],
        "modulations": [1.0, 2.0, 4.0, 8.0, 16.0],
        "slope_tolerance": 0.1,
    },
}


def _exponent(p):
    return np.inf if p == "inf" else float(p)


def _grid(spec) -> SpectralGrid:
    return SpectralGrid(int(spec[0]), float(spec[1]))


def merged_params(check: str, overrides: dict | None) -> dict:
    params = copy.deepcopy(DEFAULT_SWEEPS[check])
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ValueError(f"{check}: unknown sweep parameter {key!r}")
        params[key] = value
    return params


def shell_member(grid: SpectralGrid, j: int, width0: float, center: float):
    return modulated_gaussian(grid, (center * 2.0**j, 0.0), width=width0 / 2.0**j)


# -- checks ---------------------------------------------------------------------


def check_bernstein(params: dict, rng: np.random.Generator) -> dict:
    grid = _grid(params["grid"])
    J = j_max(grid)
    members = {j: shell_member(grid, j, params["width0"], params["shell_center"]) for j in range(1, J + 1)}
    sweep, spreads = [], {}
    for q, r in params["pairs"]:
        ratios = []
        for j in range(1, J + 1):
            ratio = bernstein_ratio(members[j], j, _exponent(q), _exponent(r))
            sweep.append({"q": q, "r": r, "j": j, "ratio": ratio})
            ratios.append(ratio)
        spreads[f"{q},{r}"] = max(ratios) / min(ratios)
    worst = max(spreads.values())
    return {
        "sweep": sweep,
        "max_ratio": max(e["ratio"] for e in sweep),
        "conditions": {
            "spread_across_shells": {"value": spreads, "limit": params["max_spread"], "passed": worst <= params["max_spread"]}
        },
    }


def check_dyadic_multiplier(params: dict, rng: np.random.Generator) -> dict:
    grid = _grid(params["grid"])
    J = j_max(grid)
    members = {j: shell_member(grid, j, params["width0"], params["shell_center"]) for j in range(1, J + 1)}
    sigmas = [-2.0, -1.0] + [s / 2 for s in params["s"]]
    sweep, worst = [], 0.0
    for sigma in sigmas:
        for b in params["b"]:
            for p in params["p"]:
                ratios = [dyadic_multiplier_ratio(members[j], j, sigma, b, _exponent(p)) for j in range(1, J + 1)]
                for j, ratio in enumerate(ratios, start=1):
                    sweep.append({"sigma": sigma, "b": b, "p": p, "j": j, "ratio": ratio})
                worst = max(worst, max(ratios) / min(ratios))
    return {
        "sweep": sweep,
        "max_ratio": max(e["ratio"] for e in sweep),
        "conditions": {
            "spread_across_shells": {"value": worst, "limit": params["max_spread"], "passed": worst <= params["max_spread"]}
        },
    }


def check_product_estimate(params: dict, rng: np.random.Generator) -> dict:
    grid = _grid(params["grid"])
    pairs = [
        (random_band_limited(grid, params["k_cut"], rng), random_band_limited(grid, params["k_cut"], rng))
        for _ in range(params["members"])
    ]
    g = gaussian(grid)
    sweep = []
    for s in params["s"]:
        sweep.append({"s": s, "member": "gaussian", "ratio": product_estimate_ratio(g, g, s)})
        for i, (phi, psi) in enumerate(pairs):
            sweep.append({"s": s, "member": i, "ratio": product_estimate_ratio(phi, psi, s)})
    ratios = [e["ratio"] for e in sweep]
    spread = max(ratios) / min(ratios)
    return {
        "sweep": sweep,
        "max_ratio": max(ratios),
        "conditions": {
            "finite": {"passed": bool(np.all(np.isfinite(ratios)))},
            "spread_across_family": {"value": spread, "limit": params["max_spread"], "passed": spread <= params["max_spread"]},
        },
    }


def check_brezis_gallouet(params: dict, rng: np.random.Generator) -> dict:
    k0, k1 = params["octaves"]
    lams = [2.0**k for k in range(k0, k1 + 1)]
    points = gaussian_scale_sweep(lams, params["s"], params["b"])
    sweep = [
        {
            "lam": p.lam,
            "s": p.s,
            "b": p.b,
            "lhs_inf": p.report.lhs_inf,
            "lhs_2s": p.report.lhs_2s,
            "l1": p.report.l1,
            "besov": p.report.besov,
            "rhs": p.report.rhs,
            "ratio": p.ratio,
        }
        for p in points
    ]
    growth = []
    for s in params["s"]:
        for b in params["b"]:
            series = {e["lam"]: e["ratio"] for e in sweep if e["s"] == s and e["b"] == b}
            for k in range(max(k0, params["from_octave"]), k1):
                g = series[2.0 ** (k + 1)] / series[2.0**k]
                growth.append({"s": s, "b": b, "k": k, "growth": g})
    worst = max(e["growth"] for e in growth) if growth else 0.0
    return {
        "route": "radial Hankel transform on R^2",
        "sweep": sweep,
        "max_ratio": max(e["ratio"] for e in sweep),
        "conditions": {
            "growth_per_octave": {
                "value": worst,
                "limit": params["growth_limit"],
                "detail": growth,
                "passed": worst <= params["growth_limit"],
            }
        },
    }


def check_kernel_bound(params: dict, rng: np.random.Generator) -> dict:
    rep = kernel_bound_check(
        _grid(params["grid"]),
        r_min=params["r_min"],
        r_max=params["r_max"],
        positivity_r_max=params["positivity_r_max"],
    )
    return {
        "sweep": [
            {
                "fitted_constant": rep.fitted_constant,
                "min_value": rep.min_value,
                "max_rel_err_vs_exact": rep.max_rel_err_vs_exact,
            }
        ],
        "max_ratio": rep.fitted_constant,
        "conditions": {
            "positive": {"passed": rep.positive, "value": rep.min_value},
            "bound_holds": {"passed": rep.holds},
        },
    }


def check_kernel_lp(params: dict, rng: np.random.Generator) -> dict:
    grid = _grid(params["grid"])
    sweep = []
    for eps in params["epsilon"]:
        rep = kernel_lp_bound_check(eps, grid)
        sweep.append({"epsilon": eps, "p": rep.p, "lhs": rep.lhs, "rhs": rep.rhs, "ratio": rep.ratio})
    in_range = all(2 / 3 < e["p"] < 2 for e in sweep)
    return {
        "sweep": sweep,
        "max_ratio": max(e["ratio"] for e in sweep),
        "conditions": {
            "finite": {"passed": bool(all(np.isfinite(e["ratio"]) for e in sweep))},
            "exponent_range": {"passed": in_range},
        },
    }


def check_potential_term(params: dict, rng: np.random.Generator) -> dict:
    grid = _grid(params["grid"])
    family = [("width", w, gaussian(grid, width=w)) for w in params["widths"]]
    family += [("modulation", k, modulated_gaussian(grid, (k, 0.0), width=2.0)) for k in params["modulations"]]
    sweep, slopes = [], []
    for eps in params["epsilon"]:
        reports = []
        for label, value, psi in family:
            rep = potential_term_bound_check(psi, eps)
            sweep.append(
                {"epsilon": eps, label: value, "h_half": rep.h_half, "lhs": rep.lhs, "rhs": rep.rhs, "ratio": rep.ratio}
            )
            if label == "modulation":
                reports.append(rep)
        x = np.log([r.h_half for r in reports])
        y = np.log([r.rhs for r in reports])
        slope = float(np.polyfit(x, y, 1)[0])
        expected = 4 * eps / (1 + eps)
        slopes.append({"epsilon": eps, "slope": slope, "expected": expected, "rel_dev": abs(slope / expected - 1)})
    worst = max(e["rel_dev"] for e in slopes)
    return {
        "sweep": sweep,
        "max_ratio": max(e["ratio"] for e in sweep),
        "conditions": {
            "finite": {"passed": bool(all(np.isfinite(e["ratio"]) for e in sweep))},
            "h_half_slope": {
                "value": worst,
                "limit": params["slope_tolerance"],
                "detail": slopes,
                "passed": worst <= params["slope_tolerance"],
            },
            "exponent_range": {"passed": all(2 / 3 < lp_exponent(e) < 2 for e in params["epsilon"])},
        },
    }


CHECKS: dict[str, Callable[[dict, np.random.Generator], dict]] = {
    "bernstein": check_bernstein,
    "dyadic_multiplier": check_dyadic_multiplier,
    "product_estimate": check_product_estimate,
    "brezis_gallouet": check_brezis_gallouet,
    "kernel_bound": check_kernel_bound,
    "kernel_lp": check_kernel_lp,
    "potential_term": check_potential_term,
}


# -- baselines and suite ------------------------------------------------------------


def load_baselines(path=None) -> dict:
    if path is None:
        text = resources.files(__package__).joinpath(BASELINE_FILE).read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def _same_params(a: dict, b: dict) -> bool:
    return json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def run_check(check: str, overrides: dict | None, seed: int, baselines: dict) -> dict:
    params = merged_params(check, overrides)
    rng = np.random.default_rng(seed)
    body = CHECKS[check](params, rng)
    frozen = baselines.get(check)
    baseline = None
    if frozen is not None and frozen.get("seed") == seed and _same_params(frozen["params"], params):
        baseline = frozen["max_ratio"]
    conditions_ok = all(c["passed"] for c in body["conditions"].values())
    within = baseline is None or body["max_ratio"] <= SLACK * baseline
    return {
        "check": check,
        "params": params,
        "seed": seed,
        **body,
        "baseline": baseline,
        "baseline_limit": None if baseline is None else SLACK * baseline,
        "within_baseline": within,
        "passed": bool(conditions_ok and within),
    }


def run_suite(config: VerifySuiteConfig, baselines: dict | None = None) -> dict:
    if baselines is None:
        baselines = load_baselines()
    results = [run_check(c, config.sweeps.get(c), config.seed, baselines) for c in config.which]
    return {
        "suite": config.to_dict(),
        "slack": SLACK,
        "checks": results,
        "passed": all(r["passed"] for r in results),
    }


def freeze_baselines(report: dict, path) -> dict:
    """Record each check's max ratio, with its parameters and seed, as the regression value."""
    path = Path(path)
    frozen = json.loads(path.read_text()) if path.exists() else {}
    for r in report["checks"]:
        frozen[r["check"]] = {"params": r["params"], "seed": r["seed"], "max_ratio": r["max_ratio"]}
    path.write_text(json.dumps(frozen, indent=2, sort_keys=True) + "\n")
    return frozen


def report_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
