"""Command-line entry point: ``levelblend <command> [options]``.

Option values are resolved as built-in default < config file (``--config``,
JSON) < environment (``LEVELBLEND_<OPTION>``, e.g. ``LEVELBLEND_EPOCHS``) <
command-line flag. All randomness derives from ``--seed``:

* train:    ``derive_seed(seed, "train")`` seeds initialisation, shuffling and noise
* generate: ``rng_for(seed, "generate")``
* assemble: ``rng_for(layout_seed, "layout")`` for the layout, ``rng_for(seed, "assemble")`` for cells
* evaluate: per-study streams ``rng_for(seed, <study>, <game>, <latent>)``
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .assembler import GamePolicy, assemble, assemble_multi, load_level, save_level
from .corpus import (
    CORPUS_MAGIC,
    AnnotatedSegment,
    Corpus,
    GameId,
    Provenance,
    ingest_paths,
    load_corpus,
    merge_corpora,
    pad_zelda_corpus,
    save_corpus,
    unique_labels,
)
from .cvae import (
    LATENT_SIZES,
    ConditionLabel,
    TrainConfig,
    generate,
    load_checkpoint,
    save_checkpoint,
    train,
    write_training_log,
)
from .errors import LevelBlendError, ShapeError
from .evaluation import EvalSettings, run_evaluation, write_report
from .layout import generate_layout
from .render import Tileset, TextStyle, render_image, render_text, save_image, single_cell_level
from .seeding import derive_seed, rng_for

ENV_PREFIX = "LEVELBLEND_"

# Options that can come from config file or environment, with their types and defaults.
SETTINGS: dict[str, tuple[type, Any]] = {
    "seed": (int, 0),
    "latent": (int, 8),
    "epochs": (int, None),
    "lr": (float, 0.001),
    "batch_size": (int, 64),
    "schedule": (str, "factor"),
    "steps_min": (int, 6),
    "steps_max": (int, 12),
    "mode": (str, "desk"),
    "tileset": (str, None),
    "n_latents": (int, None),
    "n_trees": (int, None),
}


class CliError(LevelBlendError):
    """Bad combination of command-line inputs."""


def _bits(text: str) -> tuple[int, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        bits = tuple(int(p) for p in parts)
    except ValueError:
        raise CliError(f"expected comma-separated 0/1 bits, got {text!r}") from None
    if any(b not in (0, 1) for b in bits):
        raise CliError(f"expected 0/1 bits, got {text!r}")
    return bits


def _floats(text: str) -> list[float]:
    try:
        return [float(p) for p in text.replace(",", " ").split() if p]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None


def resolve_settings(args: argparse.Namespace, environ=None) -> argparse.Namespace:
    """Fill unset options from environment, then config file, then defaults."""
    environ = os.environ if environ is None else environ
    config: dict[str, Any] = {}
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise CliError(f"{args.config}: config must be a JSON object")
        config = {k: v for k, v in raw.items() if not isinstance(v, dict)}
        config.update(raw.get(args.command, {}) if isinstance(raw.get(args.command), dict) else {})
    for name, (kind, default) in SETTINGS.items():
        if getattr(args, name, None) is not None:
            continue
        env = environ.get(ENV_PREFIX + name.upper())
        try:
            if env is not None:
                value = kind(env)
            elif name in config:
                value = kind(config[name])
            else:
                value = default
        except ValueError:
            raise CliError(f"bad value for {name}: {env if env is not None else config[name]!r}") from None
        setattr(args, name, value)
    return args


# --- commands ---------------------------------------------------------------------

def cmd_ingest(args) -> int:
    corpus = ingest_paths(
        args.paths, args.game,
        augment=None if args.augment is None else args.augment == "on",
        pad=args.pad, allow_partial=args.allow_partial, transpose=args.transpose,
    )
    save_corpus(corpus, args.out)
    print(f"{len(corpus)} segments")
    print(f"{len(unique_labels(corpus))} direction classes")
    return 0


def _load_corpora(paths: Sequence[str], pad: bool) -> list[Corpus]:
    corpora = [load_corpus(p) for p in paths]
    shapes = {c.shape for c in corpora}
    if len(shapes) > 1:
        if not pad:
            detail = ", ".join(f"{p}: {c.shape[0]}x{c.shape[1]}" for p, c in zip(paths, corpora))
            raise ShapeError(f"corpora have different segment shapes ({detail}); use --pad to pad Zelda rooms")
        corpora = [pad_zelda_corpus(c) for c in corpora]
    return corpora


def cmd_train(args) -> int:
    if args.latent not in LATENT_SIZES:
        raise CliError(f"latent size must be one of {LATENT_SIZES}, got {args.latent}")
    corpora = _load_corpora(args.corpora, args.pad)
    merged = merge_corpora(corpora)
    config = TrainConfig(
        epochs=args.epochs if args.epochs is not None else 10000,
        lr=args.lr, batch_size=args.batch_size, schedule=args.schedule,
        seed=derive_seed(args.seed, "train"),
    )
    result = train(merged, config, args.latent, log_every=args.log_every)
    save_checkpoint(result.model, args.out)
    log_path = args.log or str(Path(args.out).with_suffix(".log.csv"))
    write_training_log(result.history, log_path)
    last = result.history[-1] if result.history else None
    print(f"trained {'+'.join(g.value for g in result.model.games)} latent {args.latent} "
          f"for {config.epochs} epochs on {len(merged)} segments")
    if last:
        print(f"final recon {last.recon:.4f} kl {last.kl:.4f}")
    return 0


def cmd_generate(args) -> int:
    model = load_checkpoint(args.model)
    label = ConditionLabel.parse(args.label)
    model.check_label(label)
    rng = rng_for(args.seed, "generate")
    segs = []
    for i in range(args.n):
        seg = generate(model, label, rng)
        segs.append(AnnotatedSegment(seg.grid, seg.label, seg.game, Provenance("generated", i, 0), seg.game_bits))
    corpus = Corpus(model.games, segs)
    if args.out:
        save_corpus(corpus, args.out)
        print(f"{len(segs)} segments written to {args.out}")
    else:
        for seg in segs:
            sys.stdout.write(seg.grid.text() + "\n\n")
    return 0


def cmd_assemble(args) -> int:
    models = [load_checkpoint(p) for p in args.model]
    layout_seed = args.layout_seed if args.layout_seed is not None else args.seed
    layout = generate_layout(args.steps_min, args.steps_max, rng_for(layout_seed, "layout"))
    rng = rng_for(args.seed, "assemble")
    probs = _floats(args.probs) if args.probs else None
    if len(models) > 1:
        level = assemble_multi(layout, models, probs or [1.0 / len(models)] * len(models), rng)
    else:
        model = models[0]
        policy = None
        if args.game_bits:
            policy = GamePolicy.fixed(_bits(args.game_bits))
        elif probs is not None:
            if not model.n_game_bits:
                if probs != [1.0]:
                    raise CliError("--probs for a single-game model must be 1.0")
            else:
                policy = GamePolicy(tuple(probs))
        level = assemble(layout, model, policy, rng)
    save_level(level, args.out)
    print(f"{len(layout.cells)} cells from {layout.step_count} steps written to {args.out}")
    return 0


def _parse_corpus_arg(text: str) -> tuple[GameId, Corpus]:
    corpus = load_corpus(text)
    if len(corpus.games) != 1:
        raise CliError(f"{text}: evaluate expects single-game corpora")
    return corpus.games[0], corpus


def cmd_evaluate(args) -> int:
    corpora = dict(_parse_corpus_arg(p) for p in args.corpora)
    settings = EvalSettings.for_mode(
        args.mode,
        epochs=args.epochs,
        n_latents=args.n_latents,
        blend_latents=args.n_latents,
        density_cap=args.n_latents,
        n_trees=args.n_trees,
        latent_sizes=tuple(args.latent_sizes) if args.latent_sizes else None,
        blend_latent_sizes=tuple(args.latent_sizes) if args.latent_sizes else None,
    )
    models = {}
    for spec in args.checkpoint or []:
        name, _, path = spec.partition("=")
        if not path:
            raise CliError(f"--checkpoint expects NAME=PATH, got {spec!r}")
        m = load_checkpoint(path)
        models[(name, m.latent_dim)] = m
    report = run_evaluation(corpora, settings, args.seed, models)
    written = write_report(report, args.out)
    print(f"report written to {args.out} ({len(written)} files)")
    return 0


def _read_any(path: str, game: str | None, index: int | None):
    text = Path(path).read_text(encoding="utf-8")
    first = text.split("\n", 1)[0]
    if first.startswith("# levelblend level"):
        return load_level(path)
    if first == CORPUS_MAGIC:
        corpus = load_corpus(path)
        if not corpus.segments:
            raise CliError(f"{path}: corpus is empty")
        i = index or 0
        if not 0 <= i < len(corpus):
            raise CliError(f"{path}: index {i} outside 0..{len(corpus) - 1}")
        return single_cell_level(corpus.segments[i])
    if not game:
        raise CliError(f"{path}: plain level text needs --game")
    from .corpus import parse_level

    grid = parse_level(text, game)
    return single_cell_level(AnnotatedSegment(grid, None, GameId.parse(game), Provenance(Path(path).stem)))


def cmd_render(args) -> int:
    level = _read_any(args.input, args.game, args.index)
    fmt = args.format or ("png" if args.out and args.out.lower().endswith(".png") else "text")
    if fmt == "png":
        if not args.out:
            raise CliError("png output needs --out")
        save_image(render_image(level, Tileset.load(args.tileset)), args.out)
        print(f"image written to {args.out}")
    else:
        text = render_text(level, TextStyle(background=args.background))
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    return 0


def cmd_synth(args) -> int:
    from .synth import write_fixtures

    written = write_fixtures(args.out, args.seed)
    for game, paths in written.items():
        print(f"{game}: {len(paths)} level files")
    return 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="root seed for every random stream (default 0)")
    common.add_argument("--config", default=None, help="JSON file of option defaults")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="levelblend", description="Conditional VAE level generation and blending.")
    p.add_argument("--version", action="version", version=f"levelblend {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[common], help="parse level files into a corpus file")
    s.add_argument("paths", nargs="+", help="level files or directories of *.txt levels")
    s.add_argument("--game", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--augment", choices=("on", "off"), default=None, help="flip augmentation (default: on for Zelda)")
    s.add_argument("--pad", action="store_true", help="pad Zelda rooms to 15x16")
    s.add_argument("--transpose", action="store_true", help="levels are stored column-major")
    s.add_argument("--allow-partial", action="store_true", help="drop ragged edges instead of failing")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("train", parents=[common], help="train a CVAE; several corpora make a blend")
    s.add_argument("corpora", nargs="+")
    s.add_argument("--latent", type=int, choices=(4, 8, 16, 32), default=None)
    s.add_argument("--epochs", type=int, default=None, help="default 10000")
    s.add_argument("--lr", type=float, default=None)
    s.add_argument("--batch-size", type=int, default=None)
    s.add_argument("--schedule", choices=("factor", "decrement"), default=None)
    s.add_argument("--pad", action="store_true", help="pad Zelda rooms when shapes differ")
    s.add_argument("--log", default=None, help="training log CSV (default: <out>.log.csv)")
    s.add_argument("--log-every", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("generate", parents=[common], help="sample segments for one condition label")
    s.add_argument("--model", required=True)
    s.add_argument("--label", required=True, help="directional bits then game bits, e.g. 1,0,0,1,0,1")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--out", default=None, help="corpus file (default: print segments)")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("assemble", parents=[common], help="lay out and fill a whole level")
    s.add_argument("--model", action="append", required=True, help="checkpoint; repeat to alternate models")
    s.add_argument("--probs", default=None, help="per-model (several models) or per-game-bit (blend) probabilities")
    s.add_argument("--game-bits", default=None, help="fixed game bits for every cell of a blend model")
    s.add_argument("--steps-min", type=int, default=None)
    s.add_argument("--steps-max", type=int, default=None)
    s.add_argument("--layout-seed", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_assemble)

    s = sub.add_parser("evaluate", parents=[common], help="run the evaluation protocols and write reports")
    s.add_argument("corpora", nargs="+", help="single-game corpus files")
    s.add_argument("--mode", choices=("desk", "full"), default=None)
    s.add_argument("--epochs", type=int, default=None)
    s.add_argument("--latent", dest="latent_sizes", type=int, action="append", choices=(4, 8, 16, 32))
    s.add_argument("--n-latents", type=int, default=None)
    s.add_argument("--n-trees", type=int, default=None)
    s.add_argument("--checkpoint", action="append", help="NAME=PATH of a trained model to reuse")
    s.add_argument("--out", required=True, help="report directory")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("render", parents=[common], help="draw a level, corpus segment or level text")
    s.add_argument("input")
    s.add_argument("--game", default=None)
    s.add_argument("--index", type=int, default=None, help="segment index for corpus files")
    s.add_argument("--format", choices=("text", "png"), default=None)
    s.add_argument("--tileset", default=None)
    s.add_argument("--background", default=" ")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("synth", parents=[common], help="write the synthetic fixture level set")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def error_line(command: str | None, exc: BaseException) -> str:
    return json.dumps({"error": type(exc).__name__, "command": command, "message": str(exc)})


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        resolve_settings(args)
        return args.func(args)
    except (LevelBlendError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(error_line(args.command, exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
