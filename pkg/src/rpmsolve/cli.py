"""``rpm`` command line: generate | solve | sweep | render | oracle-check.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from .domain import CATALOG_VERSION, CONFIG_NAMES
from .errors import RPMError
from .generator import SCHEMA, PuzzleInstance, generate
from .harness import sweep, write_csv
from .perception import NoiseModel
from .pipeline import solve
from .render import RenderOptions, render_panel, render_svg, sample_and_render

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _epsilon(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"epsilon must lie in [0, 1], got {value}")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def instance_filename(config: str, seed: int) -> str:
    return f"{config}-{seed:06d}.rpm.json"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_instances(config: str, count: int, seed0: int, out: Path) -> Path:
    """Instance files for seeds seed0.. plus manifest.json with checksums."""
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for seed in range(seed0, seed0 + count):
        path = generate(config, seed).save(out / instance_filename(config, seed))
        entries.append({"file": path.name, "seed": seed, "sha256": _sha256(path)})
    manifest = out / "manifest.json"
    manifest.write_text(json.dumps({
        "schema": SCHEMA,
        "catalog_version": CATALOG_VERSION,
        "config": config,
        "count": count,
        "seed0": seed0,
        "instances": entries,
    }, indent=1, sort_keys=True) + "\n")
    return manifest


def cmd_generate(args) -> int:
    manifest = write_instances(args.config, args.count, args.seed, Path(args.out))
    print(f"wrote {args.count} instances and {manifest}")
    return EXIT_OK


def _render_files(panel, config, stem: Path, options: RenderOptions) -> None:
    stem.parent.mkdir(parents=True, exist_ok=True)
    render_panel(panel, config, options).save(stem.with_suffix(".pgm"))
    stem.with_suffix(".svg").write_text(render_svg(panel, config, options))


def cmd_solve(args) -> int:
    instance = PuzzleInstance.load(args.instance)
    noise = NoiseModel.load(args.noise_model) if args.noise_model else args.epsilon
    result = solve(instance, noise, args.seed, mode=args.mode, column_mode=args.column_mode,
                   executed_only=args.executed_only)
    report = result.to_json()
    report["rule_posterior"] = result.posterior.to_json()
    if args.render:
        stem = Path(args.render)
        symbol, raster = sample_and_render(result.prediction, instance.config, [args.seed, 17])
        raster.save(stem.with_suffix(".pgm"))
        stem.with_suffix(".svg").write_text(render_svg(symbol, instance.config))
        report["rendered"] = {"symbol": symbol.to_json(), "pgm": str(stem.with_suffix(".pgm"))}
    if args.dump_posterior:
        text = json.dumps(result.posterior.to_json(), indent=1, sort_keys=True) + "\n"
        if args.dump_posterior == "-":
            sys.stdout.write(text)
        else:
            Path(args.dump_posterior).write_text(text)
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(f"chosen {result.chosen} (answer {instance.answer_index}) "
          f"divergences {' '.join(f'{d:.4f}' for d in result.report.divergences)}")
    for c, comp in enumerate(result.posterior.components):
        for axis, post in comp.items():
            top = post.argmax()
            print(f"  component {c} {axis.value}: {top.name} p={post.prob_of(top):.4f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    configs = args.config or list(CONFIG_NAMES)
    rows = sweep(configs, args.epsilon, args.count, args.seed, mode=args.mode, column_mode=args.column_mode)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(rows, out, timing=args.timing)
    if args.instances:
        for config in configs:
            write_instances(config, args.count, args.seed, Path(args.instances) / config)
    for row in rows:
        print(f"{row.config:8s} eps={row.epsilon:<5g} acc={row.answer_accuracy:.3f} "
              f"gt_mass={row.mean_gt_rule_mass:.3f} failures={row.failures}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_render(args) -> int:
    instance = PuzzleInstance.load(args.instance)
    options = RenderOptions(args.width, args.height, rotation_seed=args.rotation_seed)
    out = Path(args.out)
    for i, panel in enumerate(instance.context):
        _render_files(panel, instance.config, out / f"context_{i}", options)
    for i, panel in enumerate(instance.candidates):
        _render_files(panel, instance.config, out / f"candidate_{i}", options)
    print(f"wrote 16 panels to {out}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    configs = args.config or list(CONFIG_NAMES)
    bad = 0
    for config in configs:
        wrong = 0
        for seed in range(args.seed, args.seed + args.count):
            result = solve(generate(config, seed), 0.0, seed, column_mode=args.column_mode)
            if not (result.correct and all(o.correct for o in result.axes)):
                wrong += 1
                print(f"  {config} seed {seed}: chosen {result.chosen}, answer {result.instance.answer_index}")
        print(f"{config}: {args.count - wrong}/{args.count} exact")
        bad += wrong
    return EXIT_OK if bad == 0 else EXIT_DATA


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rpm", description="Probabilistic abduction solver for Raven-style matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write instance files and a checksum manifest")
    p.add_argument("--config", choices=CONFIG_NAMES, required=True)
    p.add_argument("--count", type=_positive, default=10)
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve one instance file")
    p.add_argument("instance")
    p.add_argument("--epsilon", type=_epsilon, default=0.0)
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--mode", choices=("argmax", "sample"), default="argmax")
    p.add_argument("--column-mode", action="store_true")
    p.add_argument("--executed-only", action="store_true",
                   help="score only the executed NumberPosition field")
    p.add_argument("--noise-model", help="JSON noise model; overrides --epsilon")
    p.add_argument("--render", metavar="STEM", help="write the sampled answer as STEM.pgm and STEM.svg")
    p.add_argument("--dump-posterior", metavar="PATH", help="rule posterior JSON ('-' for stdout)")
    p.add_argument("--out", help="answer report JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="accuracy sweep to CSV")
    p.add_argument("--config", choices=CONFIG_NAMES, nargs="+")
    p.add_argument("--epsilon", type=_epsilon, nargs="+", default=[0.0, 0.05, 0.1, 0.2])
    p.add_argument("--count", type=_positive, default=100)
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--mode", choices=("argmax", "sample"), default="argmax")
    p.add_argument("--column-mode", action="store_true")
    p.add_argument("--timing", action="store_true", help="add a wall-time column (not reproducible)")
    p.add_argument("--instances", metavar="DIR", help="also write the swept instances here")
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("render", help="render the 16 panels of an instance")
    p.add_argument("instance")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--width", type=_positive, default=160)
    p.add_argument("--height", type=_positive, default=160)
    p.add_argument("--rotation-seed", type=_non_negative)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("oracle-check", help="verify exact solving at zero noise")
    p.add_argument("--config", choices=CONFIG_NAMES, nargs="+")
    p.add_argument("--count", type=_positive, default=100)
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--column-mode", action="store_true")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RPMError, OSError, ValueError, KeyError) as exc:
        print(f"rpm: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
