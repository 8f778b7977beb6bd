"""Conditional VAE over one-hot tile grids.

The condition vector (4 directional bits, optionally followed by one bit per
blended game) is concatenated to the flattened one-hot segment at the encoder
input and to the latent vector at the decoder input. Both networks have four
dense layers (three ReLU hidden layers plus a linear output). The loss per
segment is the summed per-tile cross-entropy plus the Gaussian KL term.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .archive import read_archive, write_archive
from .corpus import (
    AnnotatedSegment,
    Corpus,
    DirectionalLabel,
    GameId,
    Provenance,
    TileGrid,
    merge_corpora,
)
from .errors import AnnotationError, ShapeError, TrainingError
from .neuralcore import (
    AdamState,
    DenseNet,
    GaussianParams,
    LRSchedule,
    adam_step,
    backward,
    forward,
    kl_standard_normal,
    softmax,
    softmax_cross_entropy,
)

log = logging.getLogger(__name__)

LATENT_SIZES = (4, 8, 16, 32)
DEFAULT_HIDDEN = (512, 256, 128)
CHECKPOINT_FORMAT = "levelblend-cvae"


@dataclass(frozen=True)
class ConditionLabel:
    directional: DirectionalLabel
    game_bits: tuple[int, ...] = ()

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.game_bits):
            raise AnnotationError(f"game bits must be 0/1: {self.game_bits}")

    @property
    def width(self) -> int:
        return 4 + len(self.game_bits)

    def vector(self) -> np.ndarray:
        return np.array(tuple(self.directional) + tuple(self.game_bits), dtype=np.float64)

    @classmethod
    def parse(cls, text: str) -> "ConditionLabel":
        bits = [p for p in text.replace(",", " ").split() if p]
        if len(bits) < 4:
            raise AnnotationError(f"condition label needs at least 4 bits: {text!r}")
        try:
            game = tuple(int(b) for b in bits[4:])
        except ValueError:
            raise AnnotationError(f"non-integer game bit in {text!r}") from None
        return cls(DirectionalLabel.parse(bits[:4]), game)

    def __str__(self) -> str:
        return ",".join(str(b) for b in tuple(self.directional) + tuple(self.game_bits))


@dataclass
class TrainConfig:
    epochs: int = 10000
    lr: float = 0.001
    decay_factor: float = 0.01
    decay_interval: int = 2500
    schedule: str = "factor"
    batch_size: int = 64
    seed: int = 0
    hidden: tuple[int, ...] = DEFAULT_HIDDEN

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.lr <= 0 or self.batch_size <= 0 or self.decay_interval <= 0 or self.decay_factor < 0:
            raise ValueError("learning rate, batch size, decay interval must be positive")
        self.hidden = tuple(int(h) for h in self.hidden)

    def lr_schedule(self) -> LRSchedule:
        return LRSchedule(self.lr, self.decay_factor, self.decay_interval, self.schedule)


@dataclass
class ModelParams:
    encoder: DenseNet
    decoder: DenseNet
    latent_dim: int
    vocabulary: str
    shape: tuple[int, int]
    label_width: int
    games: tuple[GameId, ...]
    hidden: tuple[int, ...] = DEFAULT_HIDDEN
    seed: int = 0
    epochs_trained: int = 0

    def __post_init__(self):
        self.games = tuple(GameId.parse(g) for g in self.games)
        self.shape = tuple(self.shape)
        cells_v = self.cells * len(self.vocabulary)
        expected = {
            "encoder input": (self.encoder.in_dim, cells_v + self.label_width),
            "encoder output": (self.encoder.out_dim, 2 * self.latent_dim),
            "decoder input": (self.decoder.in_dim, self.latent_dim + self.label_width),
            "decoder output": (self.decoder.out_dim, cells_v),
        }
        for what, (got, want) in expected.items():
            if got != want:
                raise ShapeError(f"{what} is {got}, expected {want}")
        if self.label_width != 4 + self.n_game_bits:
            raise ShapeError(f"label width {self.label_width} does not fit {len(self.games)} game(s)")

    @property
    def cells(self) -> int:
        return self.shape[0] * self.shape[1]

    @property
    def n_game_bits(self) -> int:
        return len(self.games) if len(self.games) > 1 else 0

    @classmethod
    def create(
        cls,
        latent_dim: int,
        vocabulary: str,
        shape: tuple[int, int],
        games: Sequence[GameId | str],
        rng: np.random.Generator,
        hidden: Sequence[int] = DEFAULT_HIDDEN,
        seed: int = 0,
    ) -> "ModelParams":
        games = tuple(GameId.parse(g) for g in games)
        width = 4 + (len(games) if len(games) > 1 else 0)
        cells_v = shape[0] * shape[1] * len(vocabulary)
        hidden = tuple(hidden)
        encoder = DenseNet.init([cells_v + width, *hidden, 2 * latent_dim], rng)
        decoder = DenseNet.init([latent_dim + width, *reversed(hidden), cells_v], rng)
        return cls(encoder, decoder, latent_dim, vocabulary, shape, width, games, hidden, seed)

    def game_bits_for(self, game: GameId | str) -> tuple[int, ...]:
        if not self.n_game_bits:
            return ()
        game = GameId.parse(game)
        return tuple(int(g is game) for g in self.games)

    def check_label(self, label: ConditionLabel) -> None:
        if label.width != self.label_width:
            raise ShapeError(
                f"label {label} has width {label.width}; model expects {self.label_width}"
            )


# --- encoding helpers ---------------------------------------------------------

def _encoder_input(idx: np.ndarray, labels: np.ndarray, vocab_size: int) -> np.ndarray:
    """Dense [one-hot(tiles) | label] rows for a batch."""
    n, cells = idx.shape
    x = np.zeros((n, cells * vocab_size + labels.shape[1]))
    x[np.arange(n)[:, None], (np.arange(cells) * vocab_size)[None, :] + idx] = 1.0
    x[:, cells * vocab_size:] = labels
    return x


def _label_matrix(m: ModelParams, labels: Sequence[ConditionLabel] | np.ndarray) -> np.ndarray:
    if isinstance(labels, np.ndarray):
        arr = np.asarray(labels, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != m.label_width:
            raise ShapeError(f"label matrix {arr.shape} does not match width {m.label_width}")
        return arr
    for lab in labels:
        m.check_label(lab)
    return np.array([lab.vector() for lab in labels], dtype=np.float64).reshape(-1, m.label_width)


def segment_indices(m: ModelParams, grids: Iterable[TileGrid]) -> np.ndarray:
    rows = []
    for g in grids:
        if g.shape != m.shape:
            raise ShapeError(f"segment {g.rows}x{g.cols} does not match model {m.shape[0]}x{m.shape[1]}")
        rows.append(g.indices(m.vocabulary).ravel())
    return np.array(rows, dtype=np.int64).reshape(-1, m.cells)


def encode_batch(m: ModelParams, idx: np.ndarray, labels: np.ndarray) -> GaussianParams:
    out, _ = forward(m.encoder, _encoder_input(idx, labels, len(m.vocabulary)))
    return GaussianParams(out[:, :m.latent_dim], out[:, m.latent_dim:])


def decode_logits(m: ModelParams, z: np.ndarray, labels: np.ndarray) -> np.ndarray:
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if z.shape[1] != m.latent_dim:
        raise ShapeError(f"latent vector has {z.shape[1]} entries, model expects {m.latent_dim}")
    if labels.shape[0] != z.shape[0]:
        labels = np.broadcast_to(labels, (z.shape[0], labels.shape[1]))
    out, _ = forward(m.decoder, np.concatenate([z, labels], axis=1))
    return out.reshape(z.shape[0], m.shape[0], m.shape[1], len(m.vocabulary))


def sample_indices(m: ModelParams, z: np.ndarray, labels: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Argmax tile indices (N, rows, cols) for latent rows ``z`` under ``labels``."""
    out = []
    for start in range(0, len(z), chunk):
        lab = labels[start:start + chunk] if labels.shape[0] == len(z) else labels
        probs = softmax(decode_logits(m, z[start:start + chunk], lab))
        out.append(np.argmax(probs, axis=-1))
    if not out:
        return np.zeros((0, *m.shape), dtype=np.int64)
    return np.concatenate(out, axis=0)


# --- public single-sample operations -----------------------------------------

def encode(m: ModelParams, seg: TileGrid, label: ConditionLabel) -> GaussianParams:
    m.check_label(label)
    g = encode_batch(m, segment_indices(m, [seg]), label.vector()[None, :])
    return GaussianParams(g.mu[0], g.logvar[0])


def decode(m: ModelParams, z, label: ConditionLabel) -> np.ndarray:
    """Per-cell tile distributions, shape (rows, cols, vocabulary)."""
    m.check_label(label)
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (m.latent_dim,):
        raise ShapeError(f"latent vector has shape {z.shape}, model expects ({m.latent_dim},)")
    return softmax(decode_logits(m, z[None, :], label.vector()[None, :]))[0]


def _segment_game(m: ModelParams, label: ConditionLabel) -> GameId:
    for g, bit in zip(m.games, label.game_bits):
        if bit:
            return g
    return m.games[0]


def generate(
    m: ModelParams, label: ConditionLabel, rng: np.random.Generator, *, source: str = "generated"
) -> AnnotatedSegment:
    m.check_label(label)
    z = rng.standard_normal(m.latent_dim)
    probs = decode(m, z, label)
    grid = TileGrid.from_indices(np.argmax(probs, axis=-1), m.vocabulary)
    return AnnotatedSegment(grid, label.directional, _segment_game(m, label), Provenance(source), label.game_bits)


def reconstruct(m: ModelParams, seg: TileGrid, label: ConditionLabel) -> TileGrid:
    """Decode the encoder mean; the argmax grid of the reconstruction."""
    g = encode(m, seg, label)
    return TileGrid.from_indices(np.argmax(decode(m, g.mu, label), axis=-1), m.vocabulary)


# --- training -----------------------------------------------------------------

@dataclass
class EpochStats:
    epoch: int
    recon: float
    kl: float
    lr: float


@dataclass
class TrainResult:
    model: ModelParams
    history: list[EpochStats] = field(default_factory=list)


def loss_and_grads(
    m: ModelParams, idx: np.ndarray, labels: np.ndarray, noise: np.ndarray
) -> tuple[float, float, list[np.ndarray], list[np.ndarray]]:
    """Batch-mean reconstruction loss, KL, and gradients for encoder/decoder params."""
    n = idx.shape[0]
    L = m.latent_dim
    enc_out, enc_cache = forward(m.encoder, _encoder_input(idx, labels, len(m.vocabulary)))
    mu, logvar = enc_out[:, :L], enc_out[:, L:]
    std = np.exp(0.5 * logvar)
    z = mu + std * noise
    logits, dec_cache = forward(m.decoder, np.concatenate([z, labels], axis=1))
    logits = logits.reshape(n, m.cells, len(m.vocabulary))
    recon, dlogits = softmax_cross_entropy(logits, idx)
    kl, dmu_kl, dlogvar_kl = kl_standard_normal(GaussianParams(mu, logvar))
    dec_grads, dz_in = backward(m.decoder, dec_cache, dlogits.reshape(n, -1) / n)
    dz = dz_in[:, :L]
    dmu = dz + dmu_kl / n
    dlogvar = dz * 0.5 * std * noise + dlogvar_kl / n
    enc_grads, _ = backward(m.encoder, enc_cache, np.concatenate([dmu, dlogvar], axis=1), need_input_grad=False)
    return recon / n, kl / n, enc_grads, dec_grads


def _training_arrays(corpus: Corpus, games: tuple[GameId, ...], vocabulary: str) -> tuple[np.ndarray, np.ndarray]:
    blend = len(games) > 1
    idx, labels = [], []
    for seg in corpus.segments:
        if seg.label is None:
            raise TrainingError(f"segment {seg.provenance.key} has no directional label")
        idx.append(seg.grid.indices(vocabulary).ravel())
        bits = tuple(int(g is seg.game) for g in games) if blend else ()
        labels.append(tuple(seg.label) + bits)
    return np.array(idx, dtype=np.int64), np.array(labels, dtype=np.float64)


def train(
    corpus: Corpus,
    config: TrainConfig,
    latent_dim: int = 8,
    *,
    games: Sequence[GameId | str] | None = None,
    vocabulary: str | None = None,
    log_every: int = 0,
) -> TrainResult:
    """Fit a CVAE to ``corpus`` with Adam and step-decayed learning rate.

    One epoch is a seeded shuffle of the corpus split into batches of
    ``config.batch_size``. Blends are trained with one game bit per game in
    ``games`` order (default: ``corpus.games``).
    """
    if not corpus.segments:
        raise TrainingError("cannot train on an empty corpus")
    shape = corpus.shape
    games = tuple(GameId.parse(g) for g in (games or corpus.games))
    vocabulary = vocabulary or corpus.vocabulary
    idx, labels = _training_arrays(corpus, games, vocabulary)

    seq = np.random.SeedSequence(config.seed)
    init_seq, shuffle_seq, noise_seq = seq.spawn(3)
    model = ModelParams.create(
        latent_dim, vocabulary, shape, games, np.random.default_rng(init_seq), config.hidden, config.seed
    )
    shuffle_rng = np.random.default_rng(shuffle_seq)
    noise_rng = np.random.default_rng(noise_seq)

    enc_n = len(model.encoder.weights)
    params = model.encoder.params() + model.decoder.params()
    state = AdamState.for_params(params, config.lr_schedule())
    history: list[EpochStats] = []
    n = len(idx)
    bs = min(config.batch_size, n)
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(n)
        recon_sum = kl_sum = 0.0
        lr = state.schedule.rate(epoch)
        for start in range(0, n, bs):
            batch = order[start:start + bs]
            noise = noise_rng.standard_normal((len(batch), latent_dim))
            recon, kl, enc_g, dec_g = loss_and_grads(model, idx[batch], labels[batch], noise)
            if not (np.isfinite(recon) and np.isfinite(kl)):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch}, batch starting {start}: recon={recon}, kl={kl}"
                )
            params, state = adam_step(params, enc_g + dec_g, state, epoch)
            model.encoder = DenseNet.from_params(params[:2 * enc_n])
            model.decoder = DenseNet.from_params(params[2 * enc_n:])
            recon_sum += recon * len(batch)
            kl_sum += kl * len(batch)
        history.append(EpochStats(epoch, recon_sum / n, kl_sum / n, lr))
        if log_every and (epoch + 1) % log_every == 0:
            log.info("epoch %d recon %.4f kl %.4f lr %.2e", epoch + 1, recon_sum / n, kl_sum / n, lr)
    model.epochs_trained = config.epochs
    return TrainResult(model, history)


def blend_train(
    corpora: Sequence[Corpus], config: TrainConfig, latent_dim: int = 8, **kw
) -> TrainResult:
    """Train one model over several games; game bits follow ``corpora`` order."""
    shapes = {}
    for c in corpora:
        shapes[tuple(g.value for g in c.games)] = c.shape
    if len(set(shapes.values())) > 1:
        detail = ", ".join(f"{'+'.join(k)}: {v[0]}x{v[1]}" for k, v in shapes.items() if v)
        raise ShapeError(f"blended corpora have different segment shapes ({detail}); pad Zelda rooms first")
    merged = merge_corpora(corpora)
    return train(merged, config, latent_dim, **kw)


def write_training_log(history: Sequence[EpochStats], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "recon", "kl", "lr"])
        for h in history:
            w.writerow([h.epoch, repr(h.recon), repr(h.kl), repr(h.lr)])


# --- checkpoints --------------------------------------------------------------

def save_checkpoint(m: ModelParams, path) -> None:
    """Self-describing archive: JSON header plus every weight array as float64."""
    meta = {
        "format": CHECKPOINT_FORMAT,
        "version": 1,
        "latent_dim": m.latent_dim,
        "vocabulary": m.vocabulary,
        "shape": list(m.shape),
        "label_width": m.label_width,
        "games": [g.value for g in m.games],
        "hidden": list(m.hidden),
        "seed": m.seed,
        "epochs_trained": m.epochs_trained,
        "encoder_sizes": m.encoder.sizes,
        "decoder_sizes": m.decoder.sizes,
    }
    arrays = {}
    for prefix, net in (("encoder", m.encoder), ("decoder", m.decoder)):
        for i, p in enumerate(net.params()):
            arrays[f"{prefix}/{i:02d}"] = np.asarray(p, dtype=np.float64)
    write_archive(path, meta, arrays)


def load_checkpoint(path) -> ModelParams:
    meta, arrays = read_archive(path)
    if meta.get("format") != CHECKPOINT_FORMAT:
        raise AnnotationError(f"{path} is not a levelblend checkpoint")
    nets = {}
    for prefix in ("encoder", "decoder"):
        names = sorted(n for n in arrays if n.startswith(prefix + "/"))
        nets[prefix] = DenseNet.from_params([arrays[n] for n in names])
    return ModelParams(
        nets["encoder"],
        nets["decoder"],
        int(meta["latent_dim"]),
        meta["vocabulary"],
        tuple(meta["shape"]),
        int(meta["label_width"]),
        tuple(meta["games"]),
        tuple(meta["hidden"]),
        int(meta["seed"]),
        int(meta.get("epochs_trained", 0)),
    )
