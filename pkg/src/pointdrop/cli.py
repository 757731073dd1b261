"""Command-line front end for the feature/fit/attack/overlap pipeline.

Subcommands:

  features  extract the 14-column feature CSV for one cloud
  fit       pool top-N samples from a corpus and fit the score model
  attack    drop the N highest-predicted-score points (or a random N)
  overlap   top-N overlap percentages between two score files

Every command is deterministic given its flags; all randomness flows
through --seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .attack import (
    AttackResult,
    drop_attack,
    normalize_scores,
    overlap,
    random_drop,
    rank_top_n,
)
from .features import extract_features, features_to_csv
from .io import (
    CoefficientSet,
    format_number,
    load_coefficients,
    normalize_cloud,
    parse_scores,
    parse_xyz,
    write_coefficients,
    write_xyz,
)
from .presets import get_preset, preset_names
from .regression import fit_mlr, fit_report, select_top_targets


@dataclass(frozen=True)
class RunConfig:
    """Resolved pipeline settings shared by the subcommands."""

    k: int = 10
    sigma: float | None = None  # None = auto (mean retained-edge length)
    gamma: float = 0.5
    ball_radius: float = 0.1
    top_n: int = 100
    alpha: float = 0.05
    seed: int = 0
    preset: str | None = None


def _sigma_value(text: str):
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"sigma must be 'auto' or a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"sigma must be positive, got {text}")
    return value


def _config_from(args: argparse.Namespace) -> RunConfig:
    fields = {}
    for name in ("k", "sigma", "gamma", "ball_radius", "top_n", "alpha", "seed", "preset"):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    return RunConfig(**fields)


def _read_cloud(path: str, normalize: bool):
    cloud = parse_xyz(Path(path).read_text())
    return normalize_cloud(cloud) if normalize else cloud


def _read_scores(path: str, n: int | None = None):
    text = Path(path).read_text()
    if n is None:
        n = sum(
            1
            for line in text.splitlines()
            if line.strip() and not line.strip().startswith("#")
        )
    return parse_scores(text, n)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _resolve_coefficients(source: str | None) -> CoefficientSet:
    if source is None:
        raise ValueError("a coefficient source is required: --preset NAME or --preset FILE")
    if source in preset_names():
        return get_preset(source)
    path = Path(source)
    if path.exists():
        return load_coefficients(path.read_text())
    known = ", ".join(preset_names())
    raise ValueError(
        f"{source!r} is neither a bundled preset nor an existing file; presets: {known}"
    )


def _cmd_features(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    cloud = _read_cloud(args.cloud, args.normalize)
    feats = extract_features(
        cloud, k=cfg.k, sigma=cfg.sigma, gamma=cfg.gamma, ball_radius=cfg.ball_radius
    )
    _emit(features_to_csv(feats), args.output)
    return 0


def _pair_corpus(cloud_dir: str, scores_dir: str):
    """Match cloud files to score files by basename stem."""
    clouds = {p.stem: p for p in sorted(Path(cloud_dir).iterdir()) if p.is_file()}
    scores = {p.stem: p for p in sorted(Path(scores_dir).iterdir()) if p.is_file()}
    if not clouds:
        raise ValueError(f"no cloud files found in {cloud_dir}")
    unmatched = sorted(set(clouds) ^ set(scores))
    if unmatched:
        raise ValueError(f"unmatched cloud/score basenames: {', '.join(unmatched)}")
    return [(stem, clouds[stem], scores[stem]) for stem in sorted(clouds)]


def _cmd_fit(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    pairs = _pair_corpus(args.cloud_dir, args.scores_dir)
    samples = []
    for stem, cloud_path, score_path in pairs:
        cloud = _read_cloud(str(cloud_path), args.normalize)
        raw = _read_scores(str(score_path), cloud.n)
        z = normalize_scores(raw)
        feats = extract_features(
            cloud, k=cfg.k, sigma=cfg.sigma, gamma=cfg.gamma, ball_radius=cfg.ball_radius
        )
        samples.extend(select_top_targets(z, feats, cfg.top_n))
    fit = fit_mlr(samples, alpha=cfg.alpha)
    provenance = (
        f"fitted: {len(pairs)} clouds, per-cloud min-max score normalization, "
        f"top-{cfg.top_n} pooling, alpha={cfg.alpha:g}"
    )
    sys.stdout.write(f"{provenance}\n{fit_report(fit)}")
    document = write_coefficients(fit.to_coefficient_set(provenance))
    if args.output is None:
        sys.stdout.write(document)
    else:
        Path(args.output).write_text(document)
    return 0


def _attack_report(result: AttackResult, provenance: str) -> str:
    lines = [
        f"N = {result.n_dropped}",
        f"coefficients = {provenance}",
        f"retained points = {result.retained_cloud.n}",
    ]
    if result.scores is not None:
        lines.append("dropped index, predicted score")
        vals = result.scores.values
        lines.extend(f"{i}, {format_number(vals[i])}" for i in result.dropped_indices)
    else:
        lines.append("dropped index")
        lines.extend(str(i) for i in result.dropped_indices)
    return "\n".join(lines) + "\n"


def _cmd_attack(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    cloud = _read_cloud(args.cloud, args.normalize)
    if args.random:
        result = random_drop(cloud, cfg.top_n, cfg.seed)
        provenance = f"none (random baseline, seed {cfg.seed})"
    else:
        coeffs = _resolve_coefficients(cfg.preset)
        result = drop_attack(
            cloud,
            coeffs,
            cfg.top_n,
            k=cfg.k,
            sigma=cfg.sigma,
            gamma=cfg.gamma,
            ball_radius=cfg.ball_radius,
        )
        provenance = coeffs.provenance
    report = _attack_report(result, provenance)
    cloud_text = write_xyz(result.retained_cloud)
    if args.output is None:
        # Retained cloud on stdout stays pipeable; the report goes to stderr.
        sys.stdout.write(cloud_text)
        sys.stderr.write(report)
    else:
        Path(args.output).write_text(cloud_text)
        sys.stdout.write(report)
    return 0


def _cmd_overlap(args: argparse.Namespace) -> int:
    scores_a = _read_scores(args.scores_a)
    scores_b = _read_scores(args.scores_b)
    if scores_a.n != scores_b.n:
        raise ValueError(
            f"score files differ in length: {scores_a.n} vs {scores_b.n}"
        )
    n_list = []
    for token in str(args.top_n).split(","):
        token = token.strip()
        if token:
            n_list.append(int(token))
    if not n_list:
        raise ValueError("no top-N values given")
    lines = ["N,overlap_percent"]
    for n_top in n_list:
        pct = overlap(rank_top_n(scores_a, n_top), rank_top_n(scores_b, n_top))
        lines.append(f"{n_top},{pct:.12g}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pointdrop",
        description="Graph-signal point features, saliency regression, and drop-N attacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    graph_opts = argparse.ArgumentParser(add_help=False)
    graph_opts.add_argument("--k", type=int, default=10, help="neighbors per point (default 10)")
    graph_opts.add_argument(
        "--sigma",
        type=_sigma_value,
        default=None,
        help="Gaussian kernel width, or 'auto' for mean edge length (default auto)",
    )
    graph_opts.add_argument(
        "--gamma", type=float, default=0.5, help="low-pass regularization weight (default 0.5)"
    )
    graph_opts.add_argument(
        "--ball-radius", type=float, default=0.1, help="counting-ball radius (default 0.1)"
    )
    graph_opts.add_argument(
        "--normalize",
        action="store_true",
        help="center the cloud and scale its max norm to 1 before processing",
    )

    out_opts = argparse.ArgumentParser(add_help=False)
    out_opts.add_argument("--output", help="write the primary result here instead of stdout")

    p = sub.add_parser(
        "features", parents=[graph_opts, out_opts], help="extract the 14-feature CSV"
    )
    p.add_argument("cloud", help="xyz cloud file")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser(
        "fit",
        parents=[graph_opts, out_opts],
        help="fit the score model on a cloud/score corpus",
    )
    p.add_argument("cloud_dir", help="directory of xyz cloud files")
    p.add_argument("scores_dir", help="directory of score files matched by basename")
    p.add_argument(
        "--top-n", type=int, default=100, help="highest-scoring points kept per cloud (default 100)"
    )
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser(
        "attack", parents=[graph_opts, out_opts], help="drop the top-N predicted points"
    )
    p.add_argument("cloud", help="xyz cloud file")
    p.add_argument(
        "--preset", help="bundled coefficient preset name or a coefficient JSON file path"
    )
    p.add_argument("--top-n", type=int, default=100, help="points to drop (default 100)")
    p.add_argument(
        "--random", action="store_true", help="drop uniformly random points instead of predicted"
    )
    p.add_argument("--seed", type=int, default=0, help="random-drop seed (default 0)")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser(
        "overlap", parents=[out_opts], help="top-N overlap between two score files"
    )
    p.add_argument("scores_a", help="first score file")
    p.add_argument("scores_b", help="second score file")
    p.add_argument(
        "--top-n",
        default="50,100,150,200",
        help="comma-separated N values (default 50,100,150,200)",
    )
    p.set_defaults(func=_cmd_overlap)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        # KeyError's str() wraps the message in quotes; unwrap it.
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"error: {message}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
