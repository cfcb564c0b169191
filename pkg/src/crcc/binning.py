"""Monte Carlo check of the encoder-side covering step.

A binned layer generates 2^(n*pre_bin_rate) codewords i.i.d. from the
layer's cloud-conditional marginal, throws them uniformly into
2^(n*bin_rate) bins, and succeeds when the bin addressed by the message
contains a word jointly typical with the already-chosen sequences.  The
simulator measures that success rate and compares it with the covering
threshold (the conditional mutual information between the layer and its
conditioning).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import binning_thresholds
from .probability import JointPmf, PmfError, marginalize

MAX_LOG2_WORDS = 24          # codebook cap: at most 2^24 words
MAX_ORACLE_WORDS = 2 ** 20   # exhaustive word-enumeration cap
DEFAULT_EPS = 0.15
_CHUNK = 4096                # words tested per batch (early exit on success)

# which -> (binned variable, conditioning variables)
LAYERS = {
    "u1_bin": ("U1", ("W0", "W1")),
    "w2_bin": ("W2", ("W0", "W1", "U1")),
    "u2_bin": ("U2", ("W0", "W1", "U1", "W2")),
}


class CodebookTooLarge(PmfError):
    """Requested codebook or enumeration exceeds the desk-scale caps."""


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one covering experiment."""

    n: int
    trials: int
    eps: float = DEFAULT_EPS
    seed: int = 0
    which: str = "w2_bin"
    pre_bin_rate: float = 1.0
    bin_rate: float = 0.5

    def __post_init__(self):
        if self.n < 1 or self.trials < 1:
            raise ValueError("n and trials must be positive")
        if self.eps <= 0:
            raise ValueError("eps must be > 0")
        if self.which not in LAYERS:
            raise ValueError(f"which must be one of {sorted(LAYERS)}")
        if not 0 <= self.bin_rate <= self.pre_bin_rate:
            raise ValueError("need pre_bin_rate >= bin_rate >= 0")
        if self.n * self.pre_bin_rate > MAX_LOG2_WORDS:
            raise CodebookTooLarge(
                f"n*pre_bin_rate = {self.n * self.pre_bin_rate:.2f} > "
                f"{MAX_LOG2_WORDS}")

    @property
    def num_words(self) -> int:
        return round(2 ** (self.n * self.pre_bin_rate))

    @property
    def num_bins(self) -> int:
        return round(2 ** (self.n * self.bin_rate))


@dataclass(frozen=True)
class Codebook:
    """All words of one binned layer plus their bin assignment."""

    words: np.ndarray = field(repr=False)   # (num_words, n) symbols
    bin_of: np.ndarray = field(repr=False)  # (num_words,) bin indices
    num_bins: int

    def __post_init__(self):
        if len(self.words) != len(self.bin_of):
            raise ValueError("words and bin_of length mismatch")
        if len(self.bin_of) and not (0 <= self.bin_of.min()
                                     and self.bin_of.max() < self.num_bins):
            raise ValueError("bin index out of range")

    def bin_members(self, b: int) -> np.ndarray:
        return self.words[self.bin_of == b]


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    # counter-based: every (seed, trial) pair owns an independent stream
    return np.random.Generator(np.random.Philox(key=[seed, trial]))


def _layer_tables(pmf: JointPmf, which: str):
    """(cond joint p(c), word conditional p(v|w0), sizes) for one layer."""
    var, cond = LAYERS[which]
    sub = marginalize(pmf, cond + (var,))
    names = list(sub.names)
    perm = [names.index(n) for n in cond + (var,)]
    joint = np.transpose(sub.probs, perm)
    cond_sizes = joint.shape[:-1]
    vsize = joint.shape[-1]
    p_cond = joint.sum(axis=-1)
    # word generation is superposed on the cloud only: p(v | w0)
    w0 = marginalize(pmf, ("W0", var))
    wnames = list(w0.names)
    wperm = [wnames.index(n) for n in ("W0", var)]
    jw = np.transpose(w0.probs, wperm)
    mass = jw.sum(axis=-1, keepdims=True)
    p_word = np.where(mass > 0, jw / np.where(mass > 0, mass, 1.0),
                      1.0 / vsize)
    # typicality target: joint of conditioning tuple and the word symbol
    p_cells = joint.reshape(-1)
    return p_cond, p_word, cond_sizes, vsize, p_cells


def _draw_conditioning(rng, p_cond, cond_sizes, n):
    flat = p_cond.reshape(-1)
    idx = rng.choice(len(flat), size=n, p=flat)
    return idx  # flattened conditioning-tuple index per position


def _draw_words(rng, k, w0_seq, p_word):
    """(k, n) words, position i drawn i.i.d. from p_word[w0_seq[i]]."""
    n = len(w0_seq)
    u = rng.random((k, n))
    cdf = np.cumsum(p_word, axis=-1)          # (w0, v)
    pos_cdf = cdf[w0_seq]                     # (n, v)
    return (u[..., None] > pos_cdf[None]).sum(axis=-1).astype(np.int64)


def _typical_mask(words, cond_idx, vsize, n_cells, p_cells, eps):
    """Boolean mask of words jointly robust-typical with the conditioning."""
    k, n = words.shape
    cells = cond_idx[None, :] * vsize + words                # (k, n)
    offsets = np.arange(k)[:, None] * n_cells
    counts = np.bincount((offsets + cells).ravel(),
                         minlength=k * n_cells).reshape(k, n_cells)
    pi = counts / n
    lo = (1.0 - eps) * p_cells
    hi = (1.0 + eps) * p_cells
    ok = (pi >= lo[None] - 1e-15) & (pi <= hi[None] + 1e-15)
    # zero-probability cells are hard constraints
    ok &= ~((p_cells[None] == 0) & (counts > 0))
    return ok.all(axis=1)


def generate_codebooks(pmf: JointPmf, cfg: SimConfig) -> Codebook:
    """Full codebook of the selected layer, deterministic under the seed.

    Draws a cloud sequence from p(w0), then every word i.i.d. from the
    layer's cloud conditional, then uniform bin assignments.
    """
    p_cond, p_word, cond_sizes, vsize, _ = _layer_tables(pmf, cfg.which)
    rng = _trial_rng(cfg.seed, 0)
    p_w0 = marginalize(pmf, ("W0",)).probs.ravel()
    w0_seq = rng.choice(len(p_w0), size=cfg.n, p=p_w0)
    words = _draw_words(rng, cfg.num_words, w0_seq, p_word)
    bin_of = rng.integers(0, cfg.num_bins, size=cfg.num_words)
    return Codebook(words=words.astype(np.int8), bin_of=bin_of,
                    num_bins=cfg.num_bins)


def _trial_success(rng, cfg, tables) -> bool:
    p_cond, p_word, cond_sizes, vsize, p_cells = tables
    cond_idx = _draw_conditioning(rng, p_cond, cond_sizes, cfg.n)
    w0_size = cond_sizes[0]
    # W0 is the first conditioning variable; recover its per-position symbol
    w0_seq = cond_idx // int(np.prod(cond_sizes[1:], initial=1))
    # occupancy of the addressed bin: each of the num_words words lands in
    # it independently with probability 1/num_bins
    k_total = rng.binomial(cfg.num_words, 1.0 / cfg.num_bins)
    n_cells = int(np.prod(cond_sizes, initial=1)) * vsize
    done = 0
    while done < k_total:
        k = min(_CHUNK, k_total - done)
        words = _draw_words(rng, k, w0_seq, p_word)
        mask = _typical_mask(words, cond_idx, vsize, n_cells, p_cells,
                             cfg.eps)
        if mask.any():
            return True
        done += k
    return False


def encode_feasibility(pmf: JointPmf, cfg: SimConfig) -> float:
    """Fraction of trials in which the addressed bin contains a word jointly
    typical with freshly drawn conditioning sequences."""
    tables = _layer_tables(pmf, cfg.which)
    hits = 0
    for trial in range(cfg.trials):
        if _trial_success(_trial_rng(cfg.seed, trial + 1), cfg, tables):
            hits += 1
    return hits / cfg.trials


def exhaustive_success(pmf: JointPmf, cfg: SimConfig) -> float:
    """Oracle success rate: exhaustive over bin contents, Monte Carlo over
    conditioning draws.

    Enumerates every possible word to get the exact single-word typicality
    probability, then applies the exact occupancy law
    1 - (1 - p_typ / num_bins)^num_words.  Shares the conditioning stream
    with ``encode_feasibility`` (same seed, same draws).
    """
    p_cond, p_word, cond_sizes, vsize, p_cells = _layer_tables(pmf, cfg.which)
    if vsize ** cfg.n > MAX_ORACLE_WORDS:
        raise CodebookTooLarge(
            f"word enumeration {vsize}^{cfg.n} exceeds {MAX_ORACLE_WORDS}")
    all_words = np.array(
        list(np.ndindex(*(vsize,) * cfg.n)), dtype=np.int64)
    n_cells = int(np.prod(cond_sizes, initial=1)) * vsize
    total = 0.0
    for trial in range(cfg.trials):
        rng = _trial_rng(cfg.seed, trial + 1)
        cond_idx = _draw_conditioning(rng, p_cond, cond_sizes, cfg.n)
        w0_seq = cond_idx // int(np.prod(cond_sizes[1:], initial=1))
        log_p = np.log(np.maximum(p_word[w0_seq], 1e-300))  # (n, v)
        word_logp = log_p[np.arange(cfg.n)[None, :], all_words].sum(axis=1)
        mask = _typical_mask(all_words, cond_idx, vsize, n_cells, p_cells,
                             cfg.eps)
        p_typ = float(np.exp(word_logp[mask]).sum()) if mask.any() else 0.0
        p_typ = min(p_typ, 1.0)
        total += 1.0 - (1.0 - p_typ / cfg.num_bins) ** cfg.num_words
    return total / cfg.trials


def layer_threshold(pmf: JointPmf, which: str) -> float:
    """Covering threshold of one layer, in bits."""
    thr_u1, thr_w2, thr_u2 = binning_thresholds(pmf)
    return {"u1_bin": thr_u1, "w2_bin": thr_w2, "u2_bin": thr_u2}[which]


def threshold_sweep(pmf: JointPmf, base: SimConfig,
                    margins) -> list[tuple[float, float]]:
    """(margin, success) curve with pre_bin_rate = bin_rate + threshold +
    margin per point; margins must be sorted ascending."""
    margins = [float(m) for m in margins]
    if margins != sorted(margins):
        raise ValueError("margins must be sorted ascending")
    thr = layer_threshold(pmf, base.which)
    curve = []
    for m in margins:
        pre = base.bin_rate + thr + m
        if pre < base.bin_rate:
            raise ValueError(
                f"margin {m} drives pre_bin_rate below bin_rate")
        cfg = SimConfig(n=base.n, trials=base.trials, eps=base.eps,
                        seed=base.seed, which=base.which,
                        pre_bin_rate=pre, bin_rate=base.bin_rate)
        curve.append((m, encode_feasibility(pmf, cfg)))
    return curve
