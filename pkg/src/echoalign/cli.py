"""Command-line entry point wiring the pipeline and verification suites.

Exit codes: 0 success, 1 usage error, 2 data error. All randomness sits
behind explicit --seed flags; every subcommand writes a run manifest
(default: <primary output>.manifest) sufficient to reproduce its outputs.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, config, manifest
from .data import (SynthWorldSpec, generate_world, prototype_matrix,
                   prototypes_to_dataset, read_feature_file,
                   write_feature_file)
from .errors import EchoAlignError
from .modify import (ModifierConfig, class_centroids, ingest_external,
                     modify, pairs_to_dataset)
from .noise import NoiseSpec, inject
from .select import (default_tau_grid, run_pipeline, sweep,
                     write_selection_csv, write_similarity_csv,
                     write_sweep_csv)
from .theory import mi_subsample_table, run_theory_suite, similarity_split
from .train import summarize, train_classifier, write_eval_csv


class UsageError(Exception):
    """Bad flag combination detected after parsing (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code is 2; the contract here is
    1 for usage errors (2 means bad data)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_manifest_flag(sub):
    sub.add_argument("--out-manifest", default=None,
                     help="manifest path (default: <out>.manifest)")


def _emit_manifest(args, name, params, inputs, outputs, default_anchor):
    path = args.out_manifest or f"{default_anchor}.manifest"
    manifest.write_manifest(path, manifest.build_manifest(
        name, params, inputs, outputs))


_FAMILY_BY_FLAG = {"symmetric": "symmetric", "pairflip": "pairflip",
                   "idn": "instance_dependent"}


def vars_of(spec) -> dict:
    return dict(spec.__dict__)


def _cmd_generate(args) -> int:
    spec = SynthWorldSpec(
        num_classes=args.classes, dim=args.dim,
        prototype_separation=args.sep, intra_class_std=args.std,
        samples_per_class=args.per_class, seed=args.seed)
    dataset, protos = generate_world(spec)
    write_feature_file(dataset, args.out)
    proto_path = args.out_prototypes or f"{args.out}.prototypes"
    write_feature_file(
        prototypes_to_dataset(protos, spec.num_classes,
                              f"prototypes(seed={args.seed})"), proto_path)
    _emit_manifest(args, "generate", vars_of(spec), [],
                   [args.out, proto_path], args.out)
    return 0


def _cmd_corrupt(args) -> int:
    dataset = read_feature_file(args.in_path)
    spec = NoiseSpec(family=_FAMILY_BY_FLAG[args.family],
                     rate=args.rate, seed=args.seed, idn_std=args.idn_std)
    write_feature_file(inject(dataset, spec), args.out)
    _emit_manifest(args, "corrupt", vars_of(spec), [args.in_path],
                   [args.out], args.out)
    return 0


def _cmd_modify(args) -> int:
    dataset = read_feature_file(args.in_path)
    cfg = ModifierConfig(pull_strength=args.pull_strength,
                         residual_std=args.residual_std, seed=args.seed)
    inputs = [args.in_path]
    if args.prototypes:
        protos = prototype_matrix(read_feature_file(args.prototypes))
        inputs.append(args.prototypes)
        proto_source = "file"
    else:
        protos = class_centroids(dataset)
        proto_source = "class-centroids"
    pairs = modify(dataset, protos, cfg)
    modified = pairs_to_dataset(
        pairs, dataset.num_classes,
        f"modify(lambda={cfg.pull_strength},residual_std={cfg.residual_std},"
        f"seed={cfg.seed}) <- {dataset.provenance}")
    write_feature_file(modified, args.out)
    params = vars_of(cfg)
    params["prototypes"] = proto_source
    _emit_manifest(args, "modify", params, inputs, [args.out], args.out)
    return 0


def _cmd_select(args) -> int:
    if (args.modified is None) == (args.pull_strength is None):
        raise UsageError("pass exactly one of --modified or --lambda")
    inputs = [args.original]
    if args.modified:
        result, record = run_pipeline(args.tau, original_path=args.original,
                                      modified_path=args.modified)
        inputs.append(args.modified)
    else:
        if args.seed is None:
            raise UsageError("--lambda mode needs --seed")
        dataset = read_feature_file(args.original)
        cfg = ModifierConfig(pull_strength=args.pull_strength,
                             residual_std=args.residual_std, seed=args.seed)
        protos = None
        if args.prototypes:
            protos = prototype_matrix(read_feature_file(args.prototypes))
            inputs.append(args.prototypes)
        result, record = run_pipeline(args.tau, dataset=dataset,
                                      prototypes=protos, modifier_config=cfg)
    write_feature_file(result.refined, args.out_refined)
    outputs = [args.out_refined]
    if args.out_parts:
        write_selection_csv(result, args.out_parts)
        outputs.append(args.out_parts)
    manifest_path = args.out_manifest or f"{args.out_refined}.manifest"
    manifest.write_manifest(manifest_path, manifest.build_manifest(
        "select", record, inputs, outputs))
    return 0


def _cmd_sweep(args) -> int:
    pairs = ingest_external(args.original, args.modified)
    truth = read_feature_file(args.truth)
    grid = np.linspace(0.0, 1.0, args.grid_points) \
        if args.grid_points else default_tau_grid()
    curve = sweep(pairs, grid, truth)
    write_sweep_csv(curve, args.out)
    outputs = [args.out]
    if args.out_similarities:
        write_similarity_csv(pairs, truth, args.out_similarities)
        outputs.append(args.out_similarities)
    _emit_manifest(args, "sweep", {"grid_points": len(grid)},
                   [args.original, args.modified, args.truth], outputs,
                   args.out)
    return 0


def _cmd_validate_theory(args) -> int:
    kv = config.read_kv(args.spec)
    world = config.load_world_spec(kv)
    noise = config.load_noise_spec(kv)
    modifier = config.load_modifier_config(kv)
    linear = config.load_linear_spec(kv)
    report = run_theory_suite(world, noise, modifier, linear)
    config.write_kv(args.out, {k: repr(v) for k, v in report.as_dict().items()})
    outputs = [args.out]
    if args.out_similarities:
        clean, noisy_sims = similarity_split(world, noise, modifier)
        with open(args.out_similarities, "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("similarity,clean\n")
            for v in clean:
                fh.write(f"{v!r},1\n")
            for v in noisy_sims:
                fh.write(f"{v!r},0\n")
        outputs.append(args.out_similarities)
    if args.out_mi_samples:
        rows = mi_subsample_table(world, noise, modifier,
                                  args.mi_subsamples, world.seed)
        with open(args.out_mi_samples, "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("replicate,mi_original,mi_modified\n")
            for rep, mo, mm in rows:
                fh.write(f"{rep},{mo!r},{mm!r}\n")
        outputs.append(args.out_mi_samples)
    _emit_manifest(args, "validate-theory", {"spec": args.spec},
                   [args.spec], outputs, args.out)
    return 0


def _cmd_train(args) -> int:
    train_ds = read_feature_file(args.train)
    test_ds = read_feature_file(args.test)
    cfg = config.load_train_config(config.read_kv(args.config))
    report = train_classifier(train_ds, test_ds, cfg)
    write_eval_csv(report, args.out)
    summary = summarize(report)
    sys.stdout.write(summary)
    outputs = [args.out]
    if args.out_summary:
        with open(args.out_summary, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(summary)
        outputs.append(args.out_summary)
    _emit_manifest(args, "train", vars_of(cfg),
                   [args.train, args.test, args.config], outputs, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="echoalign",
                     description="noisy-label dataset curation toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("generate", help="generate a benchmark world")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--sep", type=float, required=True)
    p.add_argument("--std", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-prototypes", default=None)
    _add_manifest_flag(p)
    p.set_defaults(func=_cmd_generate)

    p = subs.add_parser("corrupt", help="inject label noise")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--family", required=True,
                   choices=["symmetric", "pairflip", "idn"])
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--idn-std", type=float, default=0.1)
    p.add_argument("--out", required=True)
    _add_manifest_flag(p)
    p.set_defaults(func=_cmd_corrupt)

    p = subs.add_parser("modify", help="pull instances toward their labels")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--prototypes", default=None,
                   help="prototype feature file (default: class centroids)")
    p.add_argument("--lambda", dest="pull_strength", type=float, required=True)
    p.add_argument("--residual-std", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_manifest_flag(p)
    p.set_defaults(func=_cmd_modify)

    p = subs.add_parser("select", help="partition into retained originals "
                                       "and included modified instances")
    p.add_argument("--original", required=True)
    p.add_argument("--modified", default=None)
    p.add_argument("--lambda", dest="pull_strength", type=float, default=None,
                   help="run the modifier inline instead of --modified")
    p.add_argument("--residual-std", type=float, default=0.0)
    p.add_argument("--prototypes", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--out-refined", required=True)
    p.add_argument("--out-parts", default=None, help="id,part,label CSV")
    _add_manifest_flag(p)
    p.set_defaults(func=_cmd_select)

    p = subs.add_parser("sweep", help="threshold sensitivity curve")
    p.add_argument("--original", required=True)
    p.add_argument("--modified", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--out-similarities", default=None)
    _add_manifest_flag(p)
    p.set_defaults(func=_cmd_sweep)

    p = subs.add_parser("validate-theory", help="run the theory checks")
    p.add_argument("--spec", required=True, help="key=value config file")
    p.add_argument("--out", required=True)
    p.add_argument("--out-similarities", default=None)
    p.add_argument("--out-mi-samples", default=None)
    p.add_argument("--mi-subsamples", type=int, default=50)
    _add_manifest_flag(p)
    p.set_defaults(func=_cmd_validate_theory)

    p = subs.add_parser("train", help="train and evaluate the classifier")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-summary", default=None)
    _add_manifest_flag(p)
    p.set_defaults(func=_cmd_train)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"echoalign: usage error: {exc}", file=sys.stderr)
        return 1
    except (EchoAlignError, OSError) as exc:
        print(f"echoalign: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
