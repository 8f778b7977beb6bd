"""Experiment protocols and report writing.

Each study samples latent vectors from a standard normal, decodes them under
every label of interest and scores the argmax segments. Studies work on stacks
of tile-index grids, so thousands of segments are scored without building
:class:`TileGrid` objects.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .classifier import Forest, cross_validate, in_out_split, one_hot_features, train_forest
from .corpus import ALL_LABELS, Corpus, DirectionalLabel, GameId, game_config, merge_corpora, pad_zelda_corpus
from .cvae import ModelParams, TrainConfig, sample_indices, train
from .metrics import density_batch, e_distance, rank_sum_test, symmetry_batch
from .seeding import derive_seed, rng_for

log = logging.getLogger(__name__)

SIGNIFICANCE = 0.05

BLENDS: dict[str, tuple[GameId, ...]] = {
    "zelda-loderunner": (GameId.ZELDA, GameId.LODERUNNER),
    "metroid-megaman": (GameId.METROID, GameId.MEGAMAN),
    "metroid-zelda": (GameId.METROID, GameId.ZELDA),
    "megaman-zelda": (GameId.MEGAMAN, GameId.ZELDA),
    "zelda-metroid-megaman": (GameId.ZELDA, GameId.METROID, GameId.MEGAMAN),
}


@dataclass(frozen=True)
class EvalSettings:
    mode: str = "desk"
    epochs: int = 2000
    n_latents: int = 200
    blend_latents: int = 100
    density_cap: int | None = 200
    latent_sizes: tuple[int, ...] = (8,)
    blend_latent_sizes: tuple[int, ...] = (8,)
    n_trees: int = 100
    cv_folds: int = 10

    @classmethod
    def for_mode(cls, mode: str, **overrides) -> "EvalSettings":
        if mode == "desk":
            base = cls()
        elif mode == "full":
            base = cls("full", 10000, 1000, 100, None, (4, 8, 16, 32), (4, 8, 16, 32))
        else:
            raise ValueError(f"mode must be 'desk' or 'full', got {mode!r}")
        clean = {k: v for k, v in overrides.items() if v is not None}
        return cls(**{**base.__dict__, **clean})


# --- sampling and scoring helpers ---------------------------------------------

def sample_under_labels(model: ModelParams, z: np.ndarray, label_rows: np.ndarray) -> np.ndarray:
    """Decode every latent row under every label row: (labels, latents, rows, cols)."""
    k, n = len(label_rows), len(z)
    Z = np.tile(z, (k, 1))
    L = np.repeat(np.asarray(label_rows, dtype=np.float64), n, axis=0)
    return sample_indices(model, Z, L).reshape(k, n, *model.shape)


def door_labels(idx: np.ndarray, vocabulary: str, game: GameId | str = GameId.ZELDA) -> np.ndarray:
    """Directional bits from door tiles in each side's border band, (N, 4)."""
    cfg = game_config(game)
    doors = [i for i, ch in enumerate(vocabulary) if ch in cfg.doors]
    mask = np.isin(idx, doors)
    b = cfg.band
    return np.stack([
        mask[:, :b, :].reshape(len(idx), -1).any(axis=1),
        mask[:, -b:, :].reshape(len(idx), -1).any(axis=1),
        mask[:, :, :b].reshape(len(idx), -1).any(axis=1),
        mask[:, :, -b:].reshape(len(idx), -1).any(axis=1),
    ], axis=1).astype(np.int64)


Predictor = Callable[[np.ndarray], np.ndarray]


def door_rule_predictor(vocabulary: str, game: GameId | str = GameId.ZELDA) -> Predictor:
    return lambda idx: door_labels(idx, vocabulary, game)


def forest_predictor(forest: Forest, vocabulary: str) -> Predictor:
    classes = np.array([tuple(c) for c in forest.classes], dtype=np.int64)

    def predict(idx: np.ndarray) -> np.ndarray:
        return classes[forest.predict_index(one_hot_features(idx, vocabulary))]

    return predict


def match_counts(predicted: np.ndarray, conditioned: Sequence[int]) -> tuple[int, int]:
    """(exact, admissible) counts of predicted rows against one conditioning label."""
    cond = np.asarray(conditioned, dtype=np.int64)[None, :]
    exact = int(np.all(predicted == cond, axis=1).sum())
    admissible = int(np.all(predicted >= cond, axis=1).sum())
    return exact, admissible


def _pct(num: int, den: int) -> float | None:
    return 100.0 * num / den if den else None


# --- Table 1: directional accuracy ---------------------------------------------

@dataclass
class DirectionalRow:
    game: str
    latent: int
    exact_in: float | None
    admissible_in: float | None
    exact_out: float | None
    admissible_out: float | None
    n_in_labels: int
    n_latents: int
    classifier: str
    cv_accuracy: float | None = None


def directional_accuracy(
    model: ModelParams,
    predictor: Predictor,
    in_labels: Sequence[DirectionalLabel],
    n_latents: int,
    rng: np.random.Generator,
    *,
    classifier: str = "forest",
) -> DirectionalRow:
    """Condition ``n_latents`` shared latents on all 16 labels and score the matches."""
    if model.n_game_bits:
        raise ValueError("directional accuracy is measured on single-game models")
    z = rng.standard_normal((n_latents, model.latent_dim))
    idx = sample_under_labels(model, z, np.array(ALL_LABELS, dtype=np.float64))
    in_set = set(in_labels)
    tallies = {True: [0, 0, 0], False: [0, 0, 0]}  # exact, admissible, total
    for k, label in enumerate(ALL_LABELS):
        ex, ad = match_counts(predictor(idx[k]), label)
        t = tallies[label in in_set]
        t[0] += ex
        t[1] += ad
        t[2] += n_latents
    i, o = tallies[True], tallies[False]
    return DirectionalRow(
        model.games[0].value, model.latent_dim,
        _pct(i[0], i[2]), _pct(i[1], i[2]), _pct(o[0], o[2]), _pct(o[1], o[2]),
        len(in_set), n_latents, classifier,
    )


# --- Tables 2-3: blend accuracy -------------------------------------------------

def game_bit_combinations(n_games: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=n_games))


@dataclass
class BlendRow:
    blend: str
    latent: int
    game_bits: tuple[int, ...]
    percentages: dict[str, float]
    n_segments: int


def train_game_forest(corpus: Corpus, vocabulary: str, rng: np.random.Generator, n_trees: int = 100) -> Forest:
    X = one_hot_features([s.grid for s in corpus.segments], vocabulary)
    return train_forest(X, [s.game.value for s in corpus.segments], n_trees, rng)


def blend_accuracy(
    model: ModelParams,
    game_forest: Forest,
    n_latents: int,
    rng: np.random.Generator,
    blend: str = "",
) -> list[BlendRow]:
    """Per game-bit combination, the share of segments the forest assigns to each game.

    Every combination is decoded under all 16 directional labels.
    """
    if not model.n_game_bits:
        raise ValueError("blend accuracy needs a blend model")
    z = rng.standard_normal((n_latents, model.latent_dim))
    names = [g.value for g in model.games]
    rows = []
    for bits in game_bit_combinations(model.n_game_bits):
        labels = np.array([tuple(d) + bits for d in ALL_LABELS], dtype=np.float64)
        idx = sample_under_labels(model, z, labels).reshape(-1, *model.shape)
        pred = game_forest.predict(one_hot_features(idx, model.vocabulary))
        counts = {g: 0 for g in names}
        for p in pred:
            counts[p] = counts.get(p, 0) + 1
        rows.append(BlendRow(blend or "-".join(names), model.latent_dim, bits,
                             {g: 100.0 * c / len(pred) for g, c in counts.items()}, len(pred)))
    return rows


# --- Table 4: density and symmetry -------------------------------------------

@dataclass
class DensitySymmetryRow:
    game: str
    latent: int | None  # None for the training-data row
    density_mean: float
    density_std: float
    symmetry_mean: float
    symmetry_std: float
    density_p: float | None = None
    symmetry_p: float | None = None
    n: int = 0

    @property
    def density_flag(self) -> bool:
        return self.density_p is not None and self.density_p < SIGNIFICANCE

    @property
    def symmetry_flag(self) -> bool:
        return self.symmetry_p is not None and self.symmetry_p < SIGNIFICANCE


def corpus_metric_arrays(corpus: Corpus, vocabulary: str, solid: str) -> tuple[np.ndarray, np.ndarray]:
    idx = np.array([s.grid.indices(vocabulary) for s in corpus.segments])
    return density_batch(idx, vocabulary, solid), symmetry_batch(idx)


def training_metrics_row(corpus: Corpus, game: GameId | str) -> DensitySymmetryRow:
    game = GameId.parse(game)
    d, s = corpus_metric_arrays(corpus, corpus.vocabulary, game_config(game).solid)
    return DensitySymmetryRow(game.value, None, d.mean(), d.std(), s.mean(), s.std(), n=len(d))


def density_symmetry_study(
    model: ModelParams,
    corpus: Corpus,
    rng: np.random.Generator,
    n_latents: int | None = None,
) -> DensitySymmetryRow:
    """Per-latent means over the IN labels, tested against the training values."""
    game = model.games[0]
    solid = "".join(game_config(game).solid)
    in_labels, _ = in_out_split(corpus)
    n = n_latents or len(corpus)
    z = rng.standard_normal((n, model.latent_dim))
    idx = sample_under_labels(model, z, np.array(in_labels, dtype=np.float64))  # (labels, n, R, C)
    flat = idx.reshape(-1, *model.shape)
    d = density_batch(flat, model.vocabulary, solid).reshape(len(in_labels), n).mean(axis=0)
    s = symmetry_batch(flat).reshape(len(in_labels), n).mean(axis=0)
    td, ts = corpus_metric_arrays(corpus, model.vocabulary, solid)
    return DensitySymmetryRow(
        game.value, model.latent_dim, d.mean(), d.std(), s.mean(), s.std(),
        rank_sum_test(d, td), rank_sum_test(s, ts), n,
    )


# --- Table 5: novelty ----------------------------------------------------------

@dataclass
class NoveltyRow:
    game: str
    latent: int
    novelty_in: float | None
    novelty_out: float | None
    overall: float
    n_latents: int


def _grid_keys(idx: np.ndarray, vocabulary: str) -> list[bytes]:
    table = np.frombuffer(vocabulary.encode("latin-1"), dtype=np.uint8)
    flat = table[idx.reshape(len(idx), -1)]
    return [row.tobytes() for row in flat]


def novelty_study(model: ModelParams, corpus: Corpus, n_latents: int, rng: np.random.Generator) -> NoveltyRow:
    """Share of generated segments absent from the corpus, split by IN/OUT label."""
    in_labels, _ = in_out_split(corpus)
    seen = {s.grid.tiles.encode("latin-1") for s in corpus.segments}
    z = rng.standard_normal((n_latents, model.latent_dim))
    idx = sample_under_labels(model, z, np.array(ALL_LABELS, dtype=np.float64))
    new = {True: [0, 0], False: [0, 0]}
    for k, label in enumerate(ALL_LABELS):
        fresh = sum(key not in seen for key in _grid_keys(idx[k], model.vocabulary))
        t = new[label in set(in_labels)]
        t[0] += fresh
        t[1] += n_latents
    total = new[True][0] + new[False][0]
    return NoveltyRow(
        model.games[0].value, model.latent_dim,
        _pct(*new[True]), _pct(*new[False]), 100.0 * total / (16 * n_latents), n_latents,
    )


# --- Fig. 3: E-distance series ---------------------------------------------------

@dataclass
class EDistancePoint:
    blend: str
    latent: int
    game_bits: tuple[int, ...]
    reference: str
    value: float


def edistance_study(
    model: ModelParams,
    corpora: Mapping[GameId | str, Corpus],
    n_latents: int,
    rng: np.random.Generator,
    blend: str = "",
) -> list[EDistancePoint]:
    """E-distance between each original corpus and segments from every game-bit combination.

    Density uses the reference game's solid tiles on both sides of the comparison.
    """
    corpora = {GameId.parse(g): c for g, c in corpora.items()}
    z = rng.standard_normal((n_latents, model.latent_dim))
    name = blend or "-".join(g.value for g in model.games)
    reference = {}
    for game in model.games:
        solid = "".join(game_config(game).solid)
        td, ts = corpus_metric_arrays(corpora[game], model.vocabulary, solid)
        reference[game] = (solid, np.column_stack([td, ts]))
    out = []
    for bits in game_bit_combinations(model.n_game_bits):
        labels = np.array([tuple(d) + bits for d in ALL_LABELS], dtype=np.float64)
        idx = sample_under_labels(model, z, labels).reshape(-1, *model.shape)
        sym = symmetry_batch(idx)
        for game in model.games:
            solid, ref = reference[game]
            pts = np.column_stack([density_batch(idx, model.vocabulary, solid), sym])
            out.append(EDistancePoint(name, model.latent_dim, bits, game.value, e_distance(ref, pts)))
    return out


# --- the whole protocol ----------------------------------------------------------

@dataclass
class EvalReport:
    mode: str
    seed: int
    directional: list[DirectionalRow] = field(default_factory=list)
    blends: list[BlendRow] = field(default_factory=list)
    density_symmetry: list[DensitySymmetryRow] = field(default_factory=list)
    novelty: list[NoveltyRow] = field(default_factory=list)
    edistance: list[EDistancePoint] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def blend_corpus(corpora: Mapping[GameId, Corpus], games: Sequence[GameId]) -> Corpus:
    """Merge in ``games`` order, padding Zelda rooms when a 15x16 game is present."""
    parts = [corpora[g] for g in games]
    if any(c.shape == (15, 16) for c in parts):
        parts = [pad_zelda_corpus(c) if GameId.ZELDA in c.games else c for c in parts]
    merged = merge_corpora(parts)
    return Corpus(tuple(games), merged.segments)


def _train(corpus: Corpus, latent: int, epochs: int, seed: int) -> ModelParams:
    return train(corpus, TrainConfig(epochs=epochs, seed=seed), latent).model


def run_evaluation(
    corpora: Mapping[GameId | str, Corpus],
    settings: EvalSettings,
    seed: int = 0,
    models: Mapping[tuple[str, int], ModelParams] | None = None,
) -> EvalReport:
    """Train (or reuse) every model the supplied corpora allow and run all studies.

    ``models`` maps ``(game or blend name, latent size)`` to trained models;
    anything missing is trained here with ``settings.epochs``.
    """
    corpora = {GameId.parse(g): c for g, c in corpora.items()}
    models = dict(models or {})
    report = EvalReport(settings.mode, seed)

    def model_for(name: str, corpus: Corpus, latent: int) -> ModelParams:
        key = (name, latent)
        if key not in models:
            log.info("training %s latent %d for %d epochs", name, latent, settings.epochs)
            models[key] = _train(corpus, latent, settings.epochs, derive_seed(seed, "train", name, latent))
        return models[key]

    for game in sorted(corpora, key=lambda g: list(GameId).index(g)):
        corpus = corpora[game]
        in_labels, _ = in_out_split(corpus)
        report.density_symmetry.append(training_metrics_row(corpus, game))
        forest, cv = None, None
        if game is not GameId.ZELDA:
            labels = [tuple(l) for l in corpus.labels]
            if len(set(labels)) >= 2:
                X = one_hot_features([s.grid for s in corpus.segments], corpus.vocabulary)
                forest = train_forest(X, labels, settings.n_trees, rng_for(seed, "forest", game.value))
                k = min(settings.cv_folds, len(labels))
                if k >= 2:
                    cv = cross_validate(X, labels, k, rng_for(seed, "cv", game.value), settings.n_trees)
            else:
                report.notes.append(f"{game.value}: fewer than two label classes; no directional forest")
        for latent in settings.latent_sizes:
            model = model_for(game.value, corpus, latent)
            if game is GameId.ZELDA:
                predictor, kind = door_rule_predictor(model.vocabulary), "door rule"
            elif forest is not None:
                predictor, kind = forest_predictor(forest, model.vocabulary), "forest"
            else:
                predictor = None
            if predictor is not None:
                row = directional_accuracy(model, predictor, in_labels, settings.n_latents,
                                           rng_for(seed, "directional", game.value, latent), classifier=kind)
                row.cv_accuracy = cv
                report.directional.append(row)
            n_ds = len(corpus) if settings.density_cap is None else min(len(corpus), settings.density_cap)
            report.density_symmetry.append(
                density_symmetry_study(model, corpus, rng_for(seed, "density", game.value, latent), n_ds)
            )
            report.novelty.append(
                novelty_study(model, corpus, settings.n_latents, rng_for(seed, "novelty", game.value, latent))
            )

    for name, games in BLENDS.items():
        if not all(g in corpora for g in games):
            report.notes.append(f"{name}: skipped (needs {', '.join(g.value for g in games)} corpora)")
            continue
        merged = blend_corpus(corpora, games)
        game_forest = train_game_forest(merged, merged.vocabulary, rng_for(seed, "game-forest", name),
                                        settings.n_trees)
        originals = {g: Corpus((g,), [s for s in merged.segments if s.game is g]) for g in games}
        for latent in settings.blend_latent_sizes:
            model = model_for(name, merged, latent)
            report.blends.extend(
                blend_accuracy(model, game_forest, settings.blend_latents,
                               rng_for(seed, "blend", name, latent), name)
            )
            report.edistance.extend(
                edistance_study(model, originals, settings.blend_latents,
                                rng_for(seed, "edistance", name, latent), name)
            )
    return report


# --- report files --------------------------------------------------------------

def _fmt(v: float | None, digits: int = 2) -> str:
    return "n/a" if v is None else f"{v:.{digits}f}"


def _bits(bits: Sequence[int]) -> str:
    return "(" + ",".join(str(b) for b in bits) + ")"


def _tsv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def report_tables(report: EvalReport) -> dict[str, str]:
    """Delimited-text tables keyed by file name."""
    return {
        "directional.tsv": _tsv(
            ["game", "latent", "classifier", "exact_in", "admissible_in", "exact_out", "admissible_out",
             "in_labels", "latents", "cv_accuracy"],
            [[r.game, r.latent, r.classifier, _fmt(r.exact_in), _fmt(r.admissible_in), _fmt(r.exact_out),
              _fmt(r.admissible_out), r.n_in_labels, r.n_latents,
              _fmt(None if r.cv_accuracy is None else 100 * r.cv_accuracy)] for r in report.directional],
        ),
        "blend.tsv": _tsv(
            ["blend", "latent", "game_bits", "game", "percent", "segments"],
            [[r.blend, r.latent, _bits(r.game_bits), g, _fmt(p), r.n_segments]
             for r in report.blends for g, p in r.percentages.items()],
        ),
        "density_symmetry.tsv": _tsv(
            ["game", "latent", "density_mean", "density_std", "symmetry_mean", "symmetry_std",
             "density_p", "symmetry_p", "density_significant", "symmetry_significant", "n"],
            [[r.game, "train" if r.latent is None else r.latent, _fmt(r.density_mean, 4), _fmt(r.density_std, 4),
              _fmt(r.symmetry_mean, 4), _fmt(r.symmetry_std, 4), _fmt(r.density_p, 6), _fmt(r.symmetry_p, 6),
              int(r.density_flag), int(r.symmetry_flag), r.n] for r in report.density_symmetry],
        ),
        "novelty.tsv": _tsv(
            ["game", "latent", "novelty_in", "novelty_out", "overall", "latents"],
            [[r.game, r.latent, _fmt(r.novelty_in, 1), _fmt(r.novelty_out, 1), _fmt(r.overall, 1), r.n_latents]
             for r in report.novelty],
        ),
        "edistance.tsv": _tsv(
            ["blend", "latent", "label", "game", "value"],
            [[p.blend, p.latent, _bits(p.game_bits), p.reference, f"{p.value:.6f}"] for p in report.edistance],
        ),
    }


def summary_text(report: EvalReport) -> str:
    out = [f"# Evaluation summary ({report.mode} mode, seed {report.seed})", ""]

    out += ["## Table 1: directional label accuracy (%)", ""]
    if report.directional:
        out.append("| game | latent | classifier | exact IN | admissible IN | exact OUT | admissible OUT | CV acc |")
        out.append("|---|---|---|---|---|---|---|---|")
        for r in report.directional:
            cv = _fmt(None if r.cv_accuracy is None else 100 * r.cv_accuracy, 1)
            out.append(f"| {r.game} | {r.latent} | {r.classifier} | {_fmt(r.exact_in)} | {_fmt(r.admissible_in)} "
                       f"| {_fmt(r.exact_out)} | {_fmt(r.admissible_out)} | {cv} |")
    else:
        out.append("No single-game corpora were supplied.")
    out.append("")

    for title, pred in (("Table 2: two-game blends (% predicted as each game)", lambda r: len(r.game_bits) == 2),
                        ("Table 3: three-game blend (% predicted as each game)", lambda r: len(r.game_bits) == 3)):
        out += [f"## {title}", ""]
        rows = [r for r in report.blends if pred(r)]
        if not rows:
            out.append("No blend of this size was evaluated (corpora missing).")
        for blend in dict.fromkeys(r.blend for r in rows):
            sub = [r for r in rows if r.blend == blend]
            games = list(sub[0].percentages)
            out.append(f"**{blend}**")
            out.append("")
            out.append("| latent | label | " + " | ".join(games) + " |")
            out.append("|---|---|" + "---|" * len(games))
            for r in sub:
                out.append(f"| {r.latent} | {_bits(r.game_bits)} | "
                           + " | ".join(_fmt(r.percentages[g], 1) for g in games) + " |")
            out.append("")
        out.append("")

    out += ["## Table 4: density and symmetry (mean ± std; * marks p < .05 vs training)", ""]
    if report.density_symmetry:
        out.append("| game | source | density | symmetry |")
        out.append("|---|---|---|---|")
        for r in report.density_symmetry:
            src = "training" if r.latent is None else f"latent {r.latent}"
            d = f"{r.density_mean:.2f}±{r.density_std:.2f}" + ("*" if r.density_flag else "")
            s = f"{r.symmetry_mean:.2f}±{r.symmetry_std:.2f}" + ("*" if r.symmetry_flag else "")
            out.append(f"| {r.game} | {src} | {d} | {s} |")
    else:
        out.append("No single-game corpora were supplied.")
    out.append("")

    out += ["## Table 5: novelty (% of generated segments not in training)", ""]
    if report.novelty:
        out.append("| game | latent | IN | OUT | overall |")
        out.append("|---|---|---|---|---|")
        for r in report.novelty:
            out.append(f"| {r.game} | {r.latent} | {_fmt(r.novelty_in, 1)} | {_fmt(r.novelty_out, 1)} "
                       f"| {_fmt(r.overall, 1)} |")
    else:
        out.append("No single-game corpora were supplied.")
    out.append("")

    out += ["## E-distance by game label", ""]
    if report.edistance:
        out.append("| blend | latent | label | reference game | E-distance |")
        out.append("|---|---|---|---|---|")
        for p in report.edistance:
            out.append(f"| {p.blend} | {p.latent} | {_bits(p.game_bits)} | {p.reference} | {p.value:.4f} |")
    else:
        out.append("No blend models were evaluated.")
    out.append("")
    if report.notes:
        out += ["## Notes", ""] + [f"- {n}" for n in report.notes] + [""]
    return "\n".join(out)


def plot_edistance(points: Sequence[EDistancePoint], path) -> None:
    """One panel per (blend, latent): E-distance against game label, a line per reference game."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    panels = list(dict.fromkeys((p.blend, p.latent) for p in points))
    fig, axes = plt.subplots(1, max(1, len(panels)), figsize=(4 * max(1, len(panels)), 3.2), squeeze=False)
    for ax, (blend, latent) in zip(axes[0], panels):
        sub = [p for p in points if p.blend == blend and p.latent == latent]
        labels = list(dict.fromkeys(_bits(p.game_bits) for p in sub))
        for ref in dict.fromkeys(p.reference for p in sub):
            vals = [next(p.value for p in sub if p.reference == ref and _bits(p.game_bits) == lab) for lab in labels]
            ax.plot(range(len(labels)), vals, marker="o", label=ref)
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=45, fontsize=7)
        ax.set_title(f"{blend} (latent {latent})", fontsize=8)
        ax.set_ylabel("E-distance")
        ax.legend(fontsize=7)
    if not panels:
        axes[0][0].text(0.5, 0.5, "no blend models", ha="center", va="center")
        axes[0][0].set_axis_off()
    fig.tight_layout()
    fig.savefig(path, format="png", dpi=100, metadata={"Software": None})
    plt.close(fig)


def write_report(report: EvalReport, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in report_tables(report).items():
        (out_dir / name).write_text(text, encoding="utf-8")
        written.append(out_dir / name)
    (out_dir / "summary.md").write_text(summary_text(report), encoding="utf-8")
    written.append(out_dir / "summary.md")
    plot_edistance(report.edistance, out_dir / "edistance.png")
    written.append(out_dir / "edistance.png")
    return written
