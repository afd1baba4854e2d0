"""Command-line front door.

Subcommands: synth (write synthetic scene files), localize (run the
pipeline on files), ablate (configuration sweeps to CSV), bench
(scalability and backend timing). Exit codes: 0 success, 1 usage error,
2 data error, 3 no solution found.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import _kernels, fileio, harness
from .errors import (EmptyHypothesisSet, MissingEmbedding, NoConsensus,
                     NoSolvableHypothesis, ParseError)
from .harness import SceneSpec
from .pipeline import PipelineConfig, localize as run_localize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NO_SOLUTION = 3


def _add_scene_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--landmarks", type=int, default=30)
    p.add_argument("--classes", type=int, default=8)
    p.add_argument("--extent", type=float, default=10.0)
    p.add_argument("--embedding-dim", type=int, default=32)
    p.add_argument("--noise", type=float, default=0.0, help="position noise sigma, meters")
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--corruption", type=float, default=0.0)
    p.add_argument("--partial", type=float, default=0.0)
    p.add_argument("--obs-embedding-noise", type=float, default=0.0)
    p.add_argument("--duplicate-cluster", type=int, default=None)


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matching", choices=("one_to_one", "knn", "adaptive"), default="adaptive")
    p.add_argument("--k", type=int, default=3, help="neighbours for knn matching")
    p.add_argument("--top-m", type=int, default=None,
                   help="adaptive truncation length (default: quarter of the map)")
    p.add_argument("--extractor", choices=("clique", "ransac", "prosac"), default="clique")
    p.add_argument("--d-adj", type=float, default=0.8)
    p.add_argument("--d-comp", type=float, default=0.3)
    p.add_argument("--alpha", type=float, default=0.7)
    p.add_argument("--steps", type=int, default=3)
    p.add_argument("--top-n", type=int, default=5)
    p.add_argument("--max-cliques", type=int, default=10_000)
    p.add_argument("--weights", choices=("none", "sim", "com", "both"), default="both")
    p.add_argument("--sac-iterations", type=int, default=1000)


def _spec_from_args(args, seed: int) -> SceneSpec:
    return SceneSpec(
        n_landmarks=args.landmarks,
        extent=args.extent,
        n_classes=args.classes,
        embedding_dim=args.embedding_dim,
        position_noise_sigma=args.noise,
        label_corruption_rate=args.corruption,
        dropout_rate=args.dropout,
        partial_observation_rate=args.partial,
        obs_embedding_noise=args.obs_embedding_noise,
        duplicate_cluster=args.duplicate_cluster,
        rng_seed=seed,
    )


def _config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        d_adj=args.d_adj, d_comp=args.d_comp, alpha=args.alpha, steps=args.steps,
        matching=args.matching, knn_k=args.k, top_m=args.top_m,
        extractor=args.extractor, top_n=args.top_n, max_cliques=args.max_cliques,
        weights=args.weights, sac_iterations=args.sac_iterations, seed=args.seed)


def _write_scene(scene, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    fileio.save_map(out_dir / "map.json", scene.omap)
    fileio.save_observation(out_dir / "observation.json", scene.observations)
    fileio.save_embeddings(out_dir / "embeddings.json", scene.embeddings)


def _cmd_synth(args) -> int:
    out = Path(args.out)
    if args.scenes == 1:
        _write_scene(harness.generate_scene(_spec_from_args(args, args.seed)), out)
        print(f"wrote scene to {out}")
    else:
        for i in range(args.scenes):
            _write_scene(harness.generate_scene(_spec_from_args(args, args.seed + i)),
                         out / f"scene_{i:03d}")
        print(f"wrote {args.scenes} scenes under {out}")
    return EXIT_OK


def _estimate_to_json(est) -> dict:
    out = fileio.pose_to_json(est.pose)
    out["weighted_rms_residual"] = est.weighted_rms_residual
    out["hypothesis_score"] = est.hypothesis_score
    return out


def _cmd_localize(args) -> int:
    omap = fileio.load_map(args.map)
    obs = fileio.load_observation(args.observation)
    emb = fileio.load_embeddings(args.embeddings) if args.embeddings else None
    config = _config_from_args(args)
    result = run_localize(omap, obs, emb, config)

    doc: dict = {
        "poses": [_estimate_to_json(e) for e in result.estimates],
        "diagnostics": result.diagnostics,
        "inliers": [[c.map_index, c.obs_index] for c in result.inlier_correspondences()],
    }
    if obs.source_pose_gt is not None:
        pe = harness.evaluate_pose(result.estimates, obs.source_pose_gt)
        doc["report"] = {
            "translation_error": pe.translation_error,
            "rotation_error": pe.rotation_error,
            "success_top1": pe.success_at(1),
            "success_top3": pe.success_at(3),
            "success_top5": pe.success_at(5),
        }
    text = json.dumps(doc, indent=1, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)

    best = result.estimates[0]
    t = best.pose.translation
    print(f"pose: t=({t[0]:.4f}, {t[1]:.4f}, {t[2]:.4f})  "
          f"residual={best.weighted_rms_residual:.6f}  "
          f"score={best.hypothesis_score:.3f}  "
          f"estimates={len(result.estimates)}", file=sys.stderr)
    if "report" in doc:
        r = doc["report"]
        print(f"eval: TE={r['translation_error']:.6f} m  RE={r['rotation_error']:.6f} rad  "
              f"top1={'yes' if r['success_top1'] else 'no'}", file=sys.stderr)
    return EXIT_OK


def _print_table(headers, rows, stream=None) -> None:
    # resolve the stream late so in-process stdout redirection still works
    stream = sys.stdout if stream is None else stream
    cells = [[str(h) for h in headers]]
    for row in rows:
        cells.append([f"{v:.6g}" if isinstance(v, float) else str(v) for v in row])
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    for r, line in enumerate(cells):
        print("  ".join(c.rjust(w) for c, w in zip(line, widths)), file=stream)
        if r == 0:
            print("  ".join("-" * w for w in widths), file=stream)


def _cmd_ablate(args) -> int:
    spec = _spec_from_args(args, args.seed)
    config = _config_from_args(args)
    rows = harness.run_ablation(args.axis, spec, config, args.scenes, args.seed)
    headers = (args.axis,) + harness.EvalReport.FIELDS
    table = [[name] + rep.row() for name, rep in rows]
    _print_table(headers, table)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(headers)
            writer.writerows(table)
        print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    spec = _spec_from_args(args, args.seed)
    config = _config_from_args(args)
    backends = {"active": [_kernels.BACKEND], "both": list(_kernels.available_backends())}
    names = backends.get(args.backend, [args.backend])
    if "native" in names and "native" not in _kernels.available_backends():
        print("error: compiled backend is not available in this install", file=sys.stderr)
        return EXIT_USAGE
    table = []
    for name in names:
        previous = _kernels.use_backend(name)
        try:
            for row in harness.benchmark_scalability(sizes, spec, config,
                                                     repeats=args.repeats, seed=args.seed):
                table.append([name, row["n_landmarks"], row["median_latency"],
                              row["mean_latency"], row["min_latency"]])
        finally:
            _kernels.use_backend(previous)
    headers = ["backend", "n_landmarks", "median_latency", "mean_latency", "min_latency"]
    _print_table(headers, table)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(headers)
            writer.writerows(table)
        print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semloc",
        description="Object-level global localization against a landmark map.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic scene files")
    p.add_argument("--out", required=True)
    p.add_argument("--scenes", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_scene_args(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("localize", help="estimate the observer pose from files")
    p.add_argument("map")
    p.add_argument("observation")
    p.add_argument("--embeddings", default=None)
    p.add_argument("--out", default=None, help="write the result JSON here")
    p.add_argument("--seed", type=int, default=0)
    _add_pipeline_args(p)
    p.set_defaults(func=_cmd_localize)

    p = sub.add_parser("ablate", help="sweep one configuration axis")
    p.add_argument("--axis", choices=("weights", "matching", "extractor", "alpha"),
                   required=True)
    p.add_argument("--scenes", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV output path")
    _add_scene_args(p)
    _add_pipeline_args(p)
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("bench", help="scalability / backend timing")
    p.add_argument("--sizes", default="50,100,200,400")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("active", "native", "python", "both"),
                   default="active")
    p.add_argument("--out", default=None, help="CSV output path")
    _add_scene_args(p)
    _add_pipeline_args(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; 0 passes through (--help)
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (MissingEmbedding, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (EmptyHypothesisSet, NoConsensus, NoSolvableHypothesis) as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
