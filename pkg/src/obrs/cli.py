"""Command-line interface: reproducible refinement experiments.

Every subcommand writes CSV files plus a ``manifest.json`` into --out. The
manifest records the command, its full configuration, the seed, library
versions, the output file list, and wall time, and is validated against the
bundled JSON schema. ``obrs rerun MANIFEST --out DIR`` re-executes any run
from its manifest; with the same seed the CSV and summary outputs are
byte-identical, which is the reproducibility contract the test suite holds
this interface to.

Exit codes: 0 on success, 1 when a run fails or an asserted numerical
invariant is violated, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import platform
import sys
import time
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import scipy

from . import __version__
from .dist import (
    bimodal_target,
    dist_from_json,
    gaussian_grid_2d,
    ratio_of,
    single_gaussian,
    trapezoid_grid,
)
from .errors import ObrsError
from .fdiv import (
    GENERATOR_PANEL,
    Generator,
    discriminator_from_ratio,
    f_value,
    fstar_value,
    ratio_from_discriminator,
)
from .landscape import (
    BUDGETS_DEFAULT,
    FIT_MU_GRID_DEFAULT,
    FIT_SIGMA_GRID_DEFAULT,
    THETA_GRID_DEFAULT,
    fit_grid,
    landscape_1d,
)
from .oracle import (
    check_improvement_bound,
    check_kl_renyi_bound,
    random_instance,
)
from .prcurve import default_lambda_grid, pr_curve, predict_refined_curve
from .sampling import (
    AcceptanceSpec,
    _solve_log_shift,
    refine,
    rejection_sample,
)
from .fdiv import max_divergence


# ---------------------------------------------------------------------------
# Output plumbing
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_summary(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest_schema() -> dict:
    text = resources.files("obrs").joinpath("data/manifest-schema.json").read_text("utf-8")
    return json.loads(text)


def _write_manifest(
    out: Path, command: str, config: dict, seed: int | None, outputs: list[str], wall: float
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "versions": {
            "obrs": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "outputs": outputs,
        "wall_time_s": wall,
    }
    jsonschema.validate(manifest, _manifest_schema())
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# generators: the panel table
# ---------------------------------------------------------------------------


def run_generators(cfg: dict, out: Path) -> list[str]:
    us = np.linspace(0.0, cfg["u_max"], cfg["u_steps"])
    rows = []
    for gen in GENERATOR_PANEL:
        for u in us:
            u = float(u)
            f = f_value(gen, u)
            if u <= 0:
                rows.append([gen.label, u, f, "", "", "", ""])
                continue
            t = discriminator_from_ratio(gen, u)
            try:
                fst = fstar_value(gen, t)
            except ObrsError:
                fst = None
            if gen.smooth:
                gap = f + fst - u * t
                roundtrip = abs(ratio_from_discriminator(gen, t) - u)
            else:
                gap = roundtrip = None
            rows.append([
                gen.label, u, f, t,
                fst if fst is not None else "",
                gap if gap is not None else "",
                roundtrip if roundtrip is not None else "",
            ])
    _write_csv(
        out / "generators.csv",
        ["generator", "u", "f", "t_opt", "fstar_at_t_opt", "fenchel_gap", "ratio_roundtrip"],
        rows,
    )
    _write_summary(out / "summary.json", {
        "f_at_one": {g.label: g.f_at_one for g in GENERATOR_PANEL},
        "smooth": {g.label: g.smooth for g in GENERATOR_PANEL},
    })
    return ["generators.csv", "summary.json"]


# ---------------------------------------------------------------------------
# refine: densities, acceptance, tradeoff curves for the bimodal pair
# ---------------------------------------------------------------------------


def run_refine(cfg: dict, out: Path) -> list[str]:
    budget = cfg["budget"]
    target = bimodal_target(cfg["target_mu"], cfg["target_sigma"])
    model = single_gaussian(cfg["model_mu"], cfg["model_sigma"])
    x, w = trapezoid_grid([target, model], n_nodes=cfg["nodes"], span=cfg["span"])
    spec, sol = refine(target, model, budget, mode="grid", grid=x, grid_weights=w)
    lp = np.asarray(target.log_density(x), dtype=float)
    lq = np.asarray(model.log_density(x), dtype=float)
    lr = lp - lq
    log_sup = spec.log_sup if spec.kind != "unit" else float(np.max(lr))
    a_unbudgeted = np.exp(np.minimum(lr - log_sup, 0.0))
    if sol.status == "budgeted":
        a_budgeted = np.exp(np.minimum(lr - log_sup + spec.log_scale, 0.0))
    elif sol.status == "unbudgeted":
        a_budgeted = a_unbudgeted.copy()
    else:
        a_budgeted = np.ones_like(lr)
    qw = w * np.exp(lq)
    z = float(np.dot(qw, a_budgeted))
    k_eff = 1.0 / z
    refined = np.exp(lq) * a_budgeted * k_eff
    _write_csv(
        out / "densities.csv",
        ["x", "target", "model", "refined"],
        [[float(xi), float(p), float(q), float(t)]
         for xi, p, q, t in zip(x, np.exp(lp), np.exp(lq), refined)],
    )
    _write_csv(
        out / "acceptance.csv",
        ["x", "accept_unbudgeted", "accept_budgeted"],
        [[float(xi), float(au), float(ab)] for xi, au, ab in zip(x, a_unbudgeted, a_budgeted)],
    )
    knee = math.exp((spec.log_scale if sol.status == "budgeted" else 0.0) - log_sup)
    lams = default_lambda_grid(knee, n=cfg["lambda_steps"])
    base = pr_curve(target, model, lams, mode="quadrature", n_nodes=cfg["nodes"], span=cfg["span"])
    scale = math.exp(spec.log_scale) if sol.status == "budgeted" else 1.0
    pred = predict_refined_curve(base, k_eff, scale, math.exp(log_sup))
    _write_csv(
        out / "prcurve.csv",
        ["lambda_base", "alpha_base", "beta_base", "lambda_refined", "alpha_refined", "beta_refined"],
        [[float(l), float(a), float(b), float(lr_), float(ar), float(br)]
         for l, a, b, lr_, ar, br in zip(base.lams, base.alphas, base.betas,
                                         pred.lams, pred.alphas, pred.betas)],
    )
    _write_summary(out / "summary.json", {
        "budget": budget,
        "status": sol.status,
        "sup_ratio": math.exp(log_sup),
        "scale": scale,
        "measured_rate": z,
        "effective_budget": k_eff,
        "solver_iterations": sol.iterations,
    })
    return ["densities.csv", "acceptance.csv", "prcurve.csv", "summary.json"]


# ---------------------------------------------------------------------------
# landscape / fit
# ---------------------------------------------------------------------------


def run_landscape(cfg: dict, out: Path) -> list[str]:
    gen = Generator.parse(cfg["gen"])
    thetas = np.linspace(cfg["theta_min"], cfg["theta_max"], cfg["theta_steps"])
    budgets = tuple(cfg["budgets"])
    surf = landscape_1d(
        gen, thetas, budgets, spacing_target=cfg["spacing_target"],
        n_nodes=cfg["nodes"], span=cfg["span"],
    )
    rows = []
    for j, budget in enumerate(surf.budgets):
        for i, theta in enumerate(surf.thetas):
            rows.append([budget, float(theta), float(surf.losses[i, j])])
    _write_csv(out / "landscape.csv", ["budget", "theta", "loss"], rows)
    counts = surf.minima_counts()
    mono = {}
    for j in range(1, len(surf.budgets)):
        gap = float(np.max(surf.losses[:, j] - surf.losses[:, j - 1]))
        mono[f"max_excess_{surf.budgets[j]:g}_vs_{surf.budgets[j-1]:g}"] = gap
    _write_summary(out / "summary.json", {
        "generator": gen.label,
        "local_minima": {f"{b:g}": counts[b] for b in surf.budgets},
        "argmin_theta": {f"{b:g}": surf.argmin_theta(b) for b in surf.budgets},
        "monotonicity": mono,
    })
    return ["landscape.csv", "summary.json"]


def run_fit(cfg: dict, out: Path) -> list[str]:
    gen = Generator.parse(cfg["gen"])
    mus = np.linspace(cfg["mu_min"], cfg["mu_max"], cfg["mu_steps"])
    sigmas = np.linspace(cfg["sigma_min"], cfg["sigma_max"], cfg["sigma_steps"])
    rows = []
    results = {}
    for budget in cfg["budgets"]:
        res = fit_grid(
            gen, budget, mus=mus, sigmas=sigmas, n_nodes=cfg["nodes"], span=cfg["span"]
        )
        for i, mu in enumerate(res.mus):
            for j, sigma in enumerate(res.sigmas):
                rows.append([budget, float(mu), float(sigma), float(res.losses[i, j])])
        results[f"{budget:g}"] = {
            "best_mu": res.best_mu,
            "best_sigma": res.best_sigma,
            "best_loss": res.best_loss,
        }
    _write_csv(out / "fit.csv", ["budget", "mu", "sigma", "loss"], rows)
    _write_summary(out / "summary.json", {"generator": gen.label, "argmin": results})
    return ["fit.csv", "summary.json"]


# ---------------------------------------------------------------------------
# bounds: canonical + randomized guarantee checks
# ---------------------------------------------------------------------------


def run_bounds(cfg: dict, out: Path) -> list[str]:
    rng = np.random.default_rng(cfg["seed"])
    from .dist import FiniteDist

    instances: list[tuple[str, FiniteDist, FiniteDist, float]] = [
        ("canonical", FiniteDist([0, 1], [0.5, 0.5]), FiniteDist([0, 1], [0.8, 0.2]), 2.0)
    ]
    for i in range(cfg["instances"]):
        t, m = random_instance(rng)
        sup = math.exp(max_divergence(t, m))
        budget = float(np.exp(rng.uniform(0.0, math.log(sup))))
        instances.append((f"i{i:04d}", t, m, budget))

    general_rows, kl_rows = [], []
    general_violations = 0
    kl_violations = 0
    canonical_kl_violated = False
    for name, t, m, budget in instances:
        for gen in GENERATOR_PANEL:
            rep = check_improvement_bound(gen, t, m, budget)
            if not rep.satisfied or not rep.witness_feasible:
                general_violations += 1
            general_rows.append([
                name, gen.label, budget, rep.lhs, rep.rhs, rep.slack,
                rep.alpha, rep.witness_divergence, rep.witness_feasible, rep.satisfied,
            ])
        kr = check_kl_renyi_bound(t, m, budget)
        if not kr.satisfied:
            kl_violations += 1
            if name == "canonical":
                canonical_kl_violated = True
        kl_rows.append([
            name, budget, kr.order, kr.kl, kr.renyi, kr.lhs, kr.rhs,
            kr.satisfied, kr.witness_feasible, kr.witness_max_excess,
            kr.limit_case or "",
        ])
    _write_csv(
        out / "bounds_general.csv",
        ["instance", "generator", "budget", "lhs", "rhs", "slack",
         "alpha", "witness_divergence", "witness_feasible", "satisfied"],
        general_rows,
    )
    _write_csv(
        out / "bounds_kl.csv",
        ["instance", "budget", "order", "kl", "renyi", "lhs", "rhs",
         "satisfied", "witness_feasible", "witness_max_excess", "limit_case"],
        kl_rows,
    )
    _write_summary(out / "summary.json", {
        "instances": len(instances),
        "general_checks": len(general_rows),
        "general_violations": general_violations,
        "kl_checks": len(kl_rows),
        "kl_violations": kl_violations,
        "kl_violation_rate": kl_violations / len(kl_rows),
        "canonical_kl_violated": canonical_kl_violated,
    })
    if general_violations:
        raise ObrsError(f"{general_violations} general bound violations (expected none)")
    return ["bounds_general.csv", "bounds_kl.csv", "summary.json"]


# ---------------------------------------------------------------------------
# grid2d: the 25-mode refinement benchmark
# ---------------------------------------------------------------------------


def _grid2d_metrics(
    samples: np.ndarray, modes: np.ndarray, radius: float, quota: int
) -> tuple[float, float]:
    d = np.linalg.norm(samples[:, None, :] - modes[None, :, :], axis=2)
    nearest = np.argmin(d, axis=1)
    close = d[np.arange(len(samples)), nearest] <= radius
    precision = float(np.mean(close))
    counts = np.bincount(nearest[close], minlength=len(modes))
    recall = float(np.mean(counts >= quota))
    return precision, recall


def run_grid2d(cfg: dict, out: Path) -> list[str]:
    target = gaussian_grid_2d(cfg["sigma"], cfg["spacing"])
    jitter_rng = np.random.default_rng([cfg["seed"], 0xD1])
    weights = jitter_rng.dirichlet(np.full(25, cfg["jitter"] / 25.0))
    surrogate = gaussian_grid_2d(cfg["surrogate_sigma"], cfg["spacing"], weights=weights)
    ratio = ratio_of(target, surrogate)

    cal_rng = np.random.default_rng([cfg["seed"], 0xCA])
    cal = surrogate.sample(cal_rng, cfg["calibration"])
    lr_cal = np.asarray(ratio.log(cal), dtype=float)
    log_sup = float(np.max(lr_cal))
    cal_w = np.full(len(lr_cal), 1.0 / len(lr_cal))
    rate = cfg["rate"]
    log_c, cal_rate, _, _ = _solve_log_shift(lr_cal - log_sup, cal_w, rate, cfg["eps"])
    # rate-matched drs shares the calibration: gamma = -log(scale)
    specs = {
        "baseline": AcceptanceSpec.unit(),
        "obrs": AcceptanceSpec(
            kind="budgeted", ratio=ratio, log_sup=log_sup, log_scale=log_c,
            budget=1.0 / rate,
        ),
        "drs": AcceptanceSpec(kind="drs", ratio=ratio, log_sup=log_sup, gamma=-log_c),
    }

    n = cfg["samples"]
    radius = 4.0 * cfg["sigma"]
    quota = max(1, n // 250)
    modes = target.means
    max_draws = int(math.ceil(50 * n / rate))
    rows = []
    agg: dict[str, dict[str, list[float]]] = {
        m: {"precision": [], "recall": [], "draws": []} for m in specs
    }
    for rep in range(cfg["repeats"]):
        for method, spec in specs.items():
            # common random numbers: every method replays the same stream
            run_rng = np.random.default_rng([cfg["seed"], 1, rep])
            result = rejection_sample(surrogate, spec, n, run_rng, max_draws=max_draws)
            precision, recall = _grid2d_metrics(result.samples, modes, radius, quota)
            ratio_evals = 0 if method == "baseline" else result.draws_used
            rows.append([
                method, rep, precision, recall, result.accepted,
                result.draws_used, ratio_evals, result.rate,
            ])
            agg[method]["precision"].append(precision)
            agg[method]["recall"].append(recall)
            agg[method]["draws"].append(result.draws_used)
    _write_csv(
        out / "grid2d.csv",
        ["method", "repeat", "precision", "recall", "accepted",
         "draws_used", "ratio_evals", "measured_rate"],
        rows,
    )
    summary = {
        "target_rate": rate,
        "calibration_rate": cal_rate,
        "sup_ratio": math.exp(log_sup),
        "scale": math.exp(log_c),
        "gamma": -log_c,
        "methods": {},
    }
    for method in specs:
        p = np.asarray(agg[method]["precision"])
        r = np.asarray(agg[method]["recall"])
        d = np.asarray(agg[method]["draws"])
        summary["methods"][method] = {
            "precision_mean": float(np.mean(p)),
            "precision_std": float(np.std(p, ddof=1)),
            "recall_mean": float(np.mean(r)),
            "recall_min": float(np.min(r)),
            "draws_per_accept_mean": float(np.mean(d) / n),
        }
    _write_summary(out / "summary.json", summary)
    return ["grid2d.csv", "summary.json"]


# ---------------------------------------------------------------------------
# sample: refinement of user-supplied distributions
# ---------------------------------------------------------------------------


def run_sample(cfg: dict, out: Path) -> list[str]:
    with open(cfg["target"], encoding="utf-8") as fh:
        target = dist_from_json(json.load(fh))
    with open(cfg["model"], encoding="utf-8") as fh:
        model = dist_from_json(json.load(fh))
    rng = np.random.default_rng([cfg["seed"], 2])
    budget = cfg["budget"] if cfg["budget"] is not None else 1.0 / cfg["rate"]
    from .dist import FiniteDist

    if isinstance(model, FiniteDist):
        spec, sol = refine(target, model, budget, mode="exact")
    else:
        cal_rng = np.random.default_rng([cfg["seed"], 3])
        spec, sol = refine(
            target, model, budget, mode="sample", n=cfg["calibration"], rng=cal_rng
        )
    result = rejection_sample(
        model, spec, cfg["samples"], rng, max_draws=cfg["max_draws"]
    )
    if isinstance(result.samples, np.ndarray):
        arr = np.atleast_2d(result.samples.T).T  # (n,) -> (n, 1)
        header = ["x"] if arr.shape[1] == 1 else ["x", "y"]
        rows = [[float(v) for v in row] for row in arr]
    else:
        header = ["sample"]
        rows = [[s] for s in result.samples]
    _write_csv(out / "samples.csv", header, rows)
    _write_summary(out / "summary.json", {
        "budget": budget,
        "status": sol.status,
        "solver_rate": sol.rate,
        "accepted": result.accepted,
        "draws_used": result.draws_used,
        "measured_rate": result.rate,
    })
    return ["samples.csv", "summary.json"]


# ---------------------------------------------------------------------------
# Dispatch, manifests, rerun
# ---------------------------------------------------------------------------


_RUNNERS = {
    "generators": run_generators,
    "refine": run_refine,
    "landscape": run_landscape,
    "fit": run_fit,
    "bounds": run_bounds,
    "grid2d": run_grid2d,
    "sample": run_sample,
}


def _execute(command: str, cfg: dict, out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    outputs = _RUNNERS[command](cfg, out)
    wall = time.perf_counter() - start
    _write_manifest(out, command, cfg, cfg.get("seed"), outputs, wall)


def run_rerun(manifest_path: str, out_dir: str) -> None:
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    jsonschema.validate(manifest, _manifest_schema())
    _execute(manifest["command"], manifest["config"], out_dir)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obrs",
        description="Budgeted rejection sampling: refinement, bounds, landscapes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generators", help="tabulate the generator panel and its duals")
    p.add_argument("--u-max", type=float, default=5.0)
    p.add_argument("--u-steps", type=int, default=26)
    p.add_argument("--out", required=True)

    p = sub.add_parser("refine", help="refine a wide Gaussian toward a bimodal target")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--budget", type=float, default=None, help="proposals per kept sample")
    group.add_argument("--rate", type=float, default=None, help="target acceptance rate")
    p.add_argument("--target-mu", type=float, default=2.0)
    p.add_argument("--target-sigma", type=float, default=0.5)
    p.add_argument("--model-mu", type=float, default=0.0)
    p.add_argument("--model-sigma", type=float, default=1.5)
    p.add_argument("--nodes", type=int, default=4096)
    p.add_argument("--span", type=float, default=8.0)
    p.add_argument("--lambda-steps", type=int, default=201)
    p.add_argument("--out", required=True)

    p = sub.add_parser("landscape", help="loss vs mode spacing across budgets")
    p.add_argument("--gen", default="gan")
    p.add_argument("--budgets", default="1,2,5")
    p.add_argument("--theta-min", type=float, default=float(THETA_GRID_DEFAULT[0]))
    p.add_argument("--theta-max", type=float, default=float(THETA_GRID_DEFAULT[-1]))
    p.add_argument("--theta-steps", type=int, default=len(THETA_GRID_DEFAULT))
    p.add_argument("--spacing-target", type=float, default=1.0)
    p.add_argument("--nodes", type=int, default=4096)
    p.add_argument("--span", type=float, default=8.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", help="grid-fit a single Gaussian under budgeted losses")
    p.add_argument("--gen", default="gan")
    p.add_argument("--budgets", default="1,2")
    p.add_argument("--mu-min", type=float, default=float(FIT_MU_GRID_DEFAULT[0]))
    p.add_argument("--mu-max", type=float, default=float(FIT_MU_GRID_DEFAULT[-1]))
    p.add_argument("--mu-steps", type=int, default=len(FIT_MU_GRID_DEFAULT))
    p.add_argument("--sigma-min", type=float, default=float(FIT_SIGMA_GRID_DEFAULT[0]))
    p.add_argument("--sigma-max", type=float, default=float(FIT_SIGMA_GRID_DEFAULT[-1]))
    p.add_argument("--sigma-steps", type=int, default=len(FIT_SIGMA_GRID_DEFAULT))
    p.add_argument("--nodes", type=int, default=4096)
    p.add_argument("--span", type=float, default=8.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bounds", help="randomized improvement-guarantee audit")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--out", required=True)

    p = sub.add_parser("grid2d", help="25-mode 2-d refinement benchmark")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rate", type=float, default=0.4)
    p.add_argument("--samples", type=int, default=2500)
    p.add_argument("--repeats", type=int, default=50)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--surrogate-sigma", type=float, default=0.1)
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--jitter", type=float, default=200.0)
    p.add_argument("--calibration", type=int, default=10000)
    p.add_argument("--eps", type=float, default=1e-9)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sample", help="rejection-sample a JSON-specified pair")
    p.add_argument("--target", required=True, help="target distribution JSON file")
    p.add_argument("--model", required=True, help="model distribution JSON file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--budget", type=float, default=None)
    group.add_argument("--rate", type=float, default=None)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-draws", type=int, default=None)
    p.add_argument("--calibration", type=int, default=10000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rerun", help="re-execute a run from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)

    return parser


def _config_from_args(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("command", "out", "manifest")}
    if args.command in ("refine", "sample"):
        if cfg.get("budget") is None and cfg.get("rate") is None:
            cfg["budget"] = 2.0
        if cfg.get("budget") is None:
            cfg["budget"] = 1.0 / cfg["rate"]
        cfg.pop("rate", None)
    if args.command in ("landscape", "fit"):
        cfg["budgets"] = [float(b) for b in str(cfg["budgets"]).split(",") if b]
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rerun":
            run_rerun(args.manifest, args.out)
        else:
            _execute(args.command, _config_from_args(args), args.out)
    except ObrsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
