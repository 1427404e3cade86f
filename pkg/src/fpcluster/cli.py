"""Command-line pipeline driver.

Subcommands cover each pipeline stage (``synth``, ``fpca-fit``,
``fpca-transform``, ``reconstruct``, ``select``, ``cluster``, ``evaluate``)
plus ``pipeline``, which runs load -> expand -> (FPCA) -> (selection) ->
cluster -> (evaluation) from a flat key=value config file and writes a
reproducible run directory.  Exit codes: 0 success, 2 config error,
3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import errors
from .basis import BasisConfig, fit_coefficients, synthesize_image
from .clustering import KmeansConfig, SpectralConfig, run_kmeans, spectral
from .evaluation import align_and_score, format_report, report_to_dict
from .fpca import fit_fpca, load_model, reconstruct, save_model, transform
from .image_io import Dataset, ImageGrid, load_manifest, write_manifest, write_pgm
from .selection import FeatureMatrix, save_plan, select, selected_feature_count
from .serialize import format_float, read_matrix_csv, write_json, write_matrix_csv
from .synthetic import planted_images

_CONFIG_ERRORS = (errors.InvalidConfig, errors.InvalidArg, errors.TooLarge)
_DATA_ERRORS = (
    errors.MissingFile,
    errors.DimensionMismatch,
    errors.MalformedManifest,
    errors.UnsupportedFormat,
    errors.IoFailure,
    errors.UnknownId,
    errors.ShapeMismatch,
    errors.DegenerateInput,
    errors.DegenerateAffinity,
    errors.MissingPositiveClass,
)
_NUMERICAL_ERRORS = (
    errors.NumericalFailure,
    errors.RankDeficient,
    errors.RankTooLow,
    errors.DegenerateOptimum,
)

EXIT_CONFIG, EXIT_DATA, EXIT_NUMERICAL = 2, 3, 4


class ConfigError(errors.FpclusterError):
    """Bad or missing pipeline configuration value."""


def parse_config_file(path) -> dict[str, str]:
    """Flat ``key=value`` lines with section prefixes like ``selector.k``.

    Blank lines and ``#`` comments are skipped; later keys override earlier
    ones.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    config: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        config[key.strip()] = value.strip()
    return config


def _get(config: dict, key: str, convert, default=None, required=False):
    if key not in config:
        if required:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    try:
        return convert(config[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from exc


def _write_assignment_csv(path, ids, labels) -> None:
    lines = ["id,label"] + [f"{i},{l}" for i, l in zip(ids, labels)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cluster_features(features, method, cfg_kmeans: KmeansConfig, sigma):
    """Run the configured clusterer, returning (assignment, report dict)."""
    if method == "kmeans":
        run = run_kmeans(features, cfg_kmeans)
        report = {
            "method": "kmeans",
            "objective": run.assignment.objective,
            "best_restart": run.best_restart,
            "iterations_per_restart": run.iterations,
            "objective_per_restart": run.objectives,
            "config": {
                "k": cfg_kmeans.k,
                "restarts": cfg_kmeans.restarts,
                "max_iters": cfg_kmeans.max_iters,
                "tol": cfg_kmeans.tol,
                "seed": cfg_kmeans.seed,
            },
        }
        return run.assignment, report
    if method == "spectral":
        spec_cfg = SpectralConfig(
            k=cfg_kmeans.k, sigma=sigma, seed=cfg_kmeans.seed, kmeans=cfg_kmeans
        )
        assignment = spectral(features, spec_cfg)
        report = {
            "method": "spectral",
            "objective": assignment.objective,
            "config": {
                "k": spec_cfg.k,
                "sigma": sigma if isinstance(sigma, str) else float(sigma),
                "seed": spec_cfg.seed,
                "restarts": cfg_kmeans.restarts,
                "max_iters": cfg_kmeans.max_iters,
                "tol": cfg_kmeans.tol,
            },
        }
        return assignment, report
    raise ConfigError(f"unknown clusterer {method!r}")


def _sigma_value(raw: str):
    if raw == "median":
        return "median"
    return float(raw)


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    dataset, _ = planted_images(
        N=args.n,
        height=args.height,
        width=args.width,
        K=args.K,
        k_groups=args.groups,
        separation=args.separation,
        noise_sd=args.noise_sd,
        seed=args.seed,
    )
    manifest = write_manifest(dataset, args.out)
    print(f"wrote {len(dataset)} images and {manifest}")
    return 0


def cmd_fpca_fit(args) -> int:
    dataset = load_manifest(args.manifest)
    coeffs = fit_coefficients(dataset, BasisConfig(args.K))
    model = fit_fpca(coeffs, args.J)
    scores = transform(model, coeffs)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, out / "model.json")
    write_matrix_csv(out / "scores.csv", scores)

    fractions = model.variance_explained()
    lines = ["component,eigenvalue,variance_fraction,cumulative_fraction"]
    cumulative = 0.0
    for j in range(model.J):
        cumulative += fractions[j]
        lines.append(
            f"{j + 1},{format_float(model.eigenvalues[j])},"
            f"{format_float(fractions[j])},{format_float(cumulative)}"
        )
    (out / "variance.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"fit J={model.J} components; variance table in {out / 'variance.csv'}")
    return 0


def cmd_fpca_transform(args) -> int:
    model = load_model(args.model)
    dataset = load_manifest(args.manifest)
    coeffs = fit_coefficients(dataset, model.basis_config)
    write_matrix_csv(args.out, transform(model, coeffs))
    print(f"wrote scores for {len(dataset)} images to {args.out}")
    return 0


def cmd_reconstruct(args) -> int:
    model = load_model(args.model)
    dataset = load_manifest(args.manifest)
    index = dataset.index_of(args.id)
    coeffs = fit_coefficients(dataset, model.basis_config)
    scores = transform(model, coeffs)

    original = dataset.images[index].pixels
    h, w = original.shape

    def error_at(j_use: int) -> tuple[float, np.ndarray]:
        rebuilt = reconstruct(model, scores[index], j_use)
        pixels = synthesize_image(rebuilt, model.basis_config, h, w)
        return float(np.linalg.norm(original - pixels)), pixels

    err, pixels = error_at(args.j_use)
    write_pgm(ImageGrid(id=args.id, pixels=np.clip(pixels, 0.0, 1.0)), args.out)
    print(f"reconstruction_error={format_float(err)}")

    if args.sweep:
        lines = ["j_use,frobenius_error"]
        for j in range(model.J + 1):
            lines.append(f"{j},{format_float(error_at(j)[0])}")
        Path(args.sweep).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def cmd_select(args) -> int:
    features = FeatureMatrix(read_matrix_csv(args.features))
    plan, reduced = select(features, k=args.k, epsilon=args.epsilon, seed=args.seed)
    save_plan(plan, args.out_plan)
    write_matrix_csv(args.out_reduced, reduced.values)
    print(f"selected r={plan.r} columns; plan in {args.out_plan}")
    return 0


def cmd_cluster(args) -> int:
    features = FeatureMatrix(read_matrix_csv(args.features))
    cfg = KmeansConfig(
        k=args.k,
        restarts=args.restarts,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed,
    )
    assignment, report = _cluster_features(
        features, args.method, cfg, _sigma_value(args.sigma)
    )
    if args.manifest:
        ids = [img.id for img in load_manifest(args.manifest).images]
    else:
        ids = [str(i + 1) for i in range(features.shape[0])]
    _write_assignment_csv(args.out_assignment, ids, assignment.labels)
    if args.out_report:
        write_json(args.out_report, report)
    print(f"objective={format_float(assignment.objective)}")
    return 0


def cmd_evaluate(args) -> int:
    dataset = load_manifest(args.manifest)
    if dataset.labels is None:
        raise errors.MalformedManifest("manifest has no label column to evaluate against")
    rows = Path(args.assignment).read_text(encoding="utf-8").splitlines()
    if not rows or rows[0] != "id,label":
        raise errors.MalformedManifest(f"{args.assignment}: expected 'id,label' header")
    labels = np.array([int(r.split(",")[1]) for r in rows[1:] if r.strip()])
    if labels.size != len(dataset):
        raise errors.ShapeMismatch("assignment rows do not match the manifest")

    from .clustering import ClusterAssignment, indicator_matrix

    k = int(labels.max())
    X, sizes = indicator_matrix(labels, k)
    assignment = ClusterAssignment(
        labels=labels, k=k, objective=0.0, indicator=X, cluster_sizes=sizes
    )
    report = align_and_score(dataset.labels, assignment, args.positive_class)
    write_json(args.out, report_to_dict(report))
    print(format_report(report))
    return 0


def run_pipeline(config: dict[str, str]) -> Path:
    """Execute the full pipeline described by a parsed config mapping."""
    manifest_path = _get(config, "manifest_path", str, required=True)
    output_dir = Path(_get(config, "output_dir", str, required=True))
    basis_K = _get(config, "basis_K", int, required=True)
    feature_source = _get(config, "feature_source", str, default="fpc_scores")
    if feature_source not in ("fpc_scores", "fourier_coeffs"):
        raise ConfigError(f"feature_source must be fpc_scores|fourier_coeffs, got {feature_source!r}")
    selector_method = _get(config, "selector.method", str, default="none")
    if selector_method not in ("none", "randomized"):
        raise ConfigError(f"selector.method must be none|randomized, got {selector_method!r}")
    clusterer_method = _get(config, "clusterer.method", str, default="kmeans")

    started = time.time()
    dataset = load_manifest(manifest_path)
    coeffs = fit_coefficients(dataset, BasisConfig(basis_K))

    output_dir.mkdir(parents=True, exist_ok=True)

    if feature_source == "fpc_scores":
        fpca_J = _get(config, "fpca_J", int, required=True)
        model = fit_fpca(coeffs, fpca_J)
        feature_array = transform(model, coeffs)
        save_model(model, output_dir / "model.json")
        write_matrix_csv(output_dir / "scores.csv", feature_array)
        features_used = fpca_J
    else:
        feature_array = coeffs
        features_used = basis_K * basis_K
    features = FeatureMatrix(feature_array)

    if selector_method == "randomized":
        sel_k = _get(config, "selector.k", int, required=True)
        sel_eps = _get(config, "selector.epsilon", float, required=True)
        sel_seed = _get(config, "selector.seed", int, default=0)
        plan, features = select(features, k=sel_k, epsilon=sel_eps, seed=sel_seed)
        save_plan(plan, output_dir / "plan.json")
        write_matrix_csv(output_dir / "selected.csv", features.values)
        features_used = plan.r

    cluster_k = _get(config, "clusterer.k", int, required=True)
    cfg = KmeansConfig(
        k=cluster_k,
        restarts=_get(config, "clusterer.restarts", int, default=20),
        max_iters=_get(config, "clusterer.max_iters", int, default=300),
        tol=_get(config, "clusterer.tol", float, default=1e-9),
        seed=_get(config, "clusterer.seed", int, default=0),
    )
    sigma = _get(config, "clusterer.sigma", _sigma_value, default="median")
    assignment, cluster_report = _cluster_features(features, clusterer_method, cfg, sigma)

    ids = [img.id for img in dataset.images]
    _write_assignment_csv(output_dir / "assignment.csv", ids, assignment.labels)
    write_json(output_dir / "cluster_report.json", cluster_report)

    accuracy = sensitivity = specificity = None
    if dataset.labels is not None:
        positive_class = _get(config, "evaluate.positive_class", int, default=None)
        if positive_class is None and max(dataset.labels) == 2:
            positive_class = 1  # binary default: group 1 is the positive class
        report = align_and_score(dataset.labels, assignment, positive_class)
        write_json(output_dir / "evaluation.json", report_to_dict(report))
        accuracy = report.accuracy
        sensitivity = report.sensitivity
        specificity = report.specificity

    def cell(x):
        return "" if x is None else format_float(x)

    summary = "features_used,accuracy,sensitivity,specificity\n" + ",".join(
        [str(features_used), cell(accuracy), cell(sensitivity), cell(specificity)]
    )
    (output_dir / "summary.csv").write_text(summary + "\n", encoding="utf-8")

    echo_lines = [f"{key}={config[key]}" for key in sorted(config)]
    (output_dir / "config_echo.txt").write_text("\n".join(echo_lines) + "\n", encoding="utf-8")
    write_json(
        output_dir / "meta.json",
        {"started_unix": started, "elapsed_seconds": time.time() - started},
    )
    return output_dir


def cmd_pipeline(args) -> int:
    config = parse_config_file(args.config)
    for override in args.set or []:
        if "=" not in override:
            raise ConfigError(f"--set expects key=value, got {override!r}")
        key, _, value = override.partition("=")
        config[key.strip()] = value.strip()
    out = run_pipeline(config)
    print(f"run directory: {out}")
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpcluster",
        description="2D functional PCA + randomized feature selection + clustering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a planted-cluster PGM dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--height", type=int, default=32)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--groups", type=int, default=2)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--noise-sd", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fpca-fit", help="fit the FPCA model and write scores")
    p.add_argument("--manifest", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fpca_fit)

    p = sub.add_parser("fpca-transform", help="project a dataset onto a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fpca_transform)

    p = sub.add_parser("reconstruct", help="rebuild one image from truncated scores")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--j-use", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sweep", help="also write a j_use error sweep CSV here")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("select", help="randomized leverage-score column selection")
    p.add_argument("--features", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-plan", required=True)
    p.add_argument("--out-reduced", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("cluster", help="k-means or spectral clustering of a CSV matrix")
    p.add_argument("--features", required=True)
    p.add_argument("--method", choices=["kmeans", "spectral"], default="kmeans")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", default="median")
    p.add_argument("--manifest", help="take sample ids from this manifest")
    p.add_argument("--out-assignment", required=True)
    p.add_argument("--out-report")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="score an assignment against manifest labels")
    p.add_argument("--assignment", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--positive-class", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config value (repeatable)")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
