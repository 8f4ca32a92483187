"""UE-side CSI engine: rank, precoder, and channel-quality selection.

The pipeline mirrors a receiver that (1) decides the rank from the
conditioning of the receive Gram matrix, (2) exhaustively searches the
precoder codebook with a per-layer MMSE SINR metric, (3) quantizes the
wideband SINR to integer dB and maps it through a rank-dependent CQI
lookup.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .channel import ChannelGrid
from .codebook import ConfigurationError, PmiIndex, PrecoderCodebook
from .linalg import DB_CEIL, DB_FLOOR, gamma_stack, inv2_stack, lin_to_int_db

# Linear per-layer SINR assigned to active layers when the noise variance
# is exactly zero; equals the +40 dB reporting ceiling.
NOISE_FREE_LAYER_SINR = 1e4

# Relative tolerance of the wideband-metric tie-break.  Codebook entries
# that are equivalent in exact arithmetic can differ by a few ulps in
# float (odd-index beam phases are not exactly unit modulus); candidates
# within this relative band of the maximum count as tied and the lowest
# enumeration index wins.
PMI_TIE_REL_TOL = 1e-12


@dataclass(frozen=True)
class CsiConfig:
    """UE reporting configuration.

    ``force_ri`` / ``force_cqi`` pin the corresponding report field (the
    rest of the pipeline still runs); ``gamma_th`` is the conditioning
    threshold below which a subcarrier votes for two layers.
    """

    gamma_th: float = 2.5
    force_ri: int | None = None
    force_cqi: int | None = None
    sinr_clamp_db: tuple[int, int] = (DB_FLOOR, DB_CEIL)

    def __post_init__(self):
        if not self.gamma_th >= 2.0:
            raise ValueError(f"gamma_th must be >= 2, got {self.gamma_th}")
        if self.force_ri not in (None, 1, 2):
            raise ValueError(f"force_ri must be 1 or 2, got {self.force_ri}")
        if self.force_cqi is not None and not 0 <= self.force_cqi <= 15:
            raise ValueError(f"force_cqi must be in [0, 15], got {self.force_cqi}")
        lo, hi = self.sinr_clamp_db
        if not lo < hi:
            raise ValueError(f"bad SINR clamp range {self.sinr_clamp_db}")


@dataclass(frozen=True)
class CsiReport:
    """One wideband CSI report: rank, precoder index, SINR, quality index."""

    ri: int
    pmi: PmiIndex
    wideband_sinr_db: int
    cqi: int


class LayerSinrs(NamedTuple):
    """Per-layer SINR with its (signal, interference+noise) split.

    ``sinr == signal / noise_interf`` elementwise; the split is what
    wideband aggregation sums separately.
    """

    sinr: np.ndarray
    signal: np.ndarray
    noise_interf: np.ndarray


def gamma_per_subcarrier(grid: ChannelGrid) -> np.ndarray:
    """Condition metric evaluated on every subcarrier of a grid."""
    vals = gamma_stack(grid.eval_matrices())
    if grid.flat:
        return np.full(grid.n_sc, vals[0])
    return vals


def compute_ri(grid: ChannelGrid, cfg: CsiConfig) -> int:
    """Rank decision from the per-subcarrier condition metric.

    A subcarrier votes for two layers when its metric is strictly below
    ``gamma_th``; the block reports rank 2 only when rank-2 votes strictly
    outnumber rank-1 votes (ties fall back to the safe single layer).
    Single-column channels always report rank 1; ``force_ri`` overrides
    everything.
    """
    if cfg.force_ri is not None:
        return cfg.force_ri
    if grid.n_tx == 1:
        return 1
    gammas = gamma_per_subcarrier(grid)
    votes2 = int(np.count_nonzero(gammas < cfg.gamma_th))
    return 2 if 2 * votes2 > grid.n_sc else 1


def _split_batch(g: np.ndarray, noise_var: float) -> LayerSinrs:
    """MMSE per-layer SINR split for a stack of effective channels.

    ``g`` has shape ``(..., 2, n_layers)`` (effective channel ``H @ W``
    per subcarrier/candidate).  With zero noise, layers with nonzero
    effective gain clamp to ``NOISE_FREE_LAYER_SINR`` (split as that value
    over 1); zero-gain layers get SINR 0.
    """
    if noise_var == 0.0:
        norms = np.sum(np.abs(g) ** 2, axis=-2)
        signal = np.where(norms > 0.0, NOISE_FREE_LAYER_SINR, 0.0)
        denom = np.ones_like(signal)
        return LayerSinrs(signal / denom, signal, denom)
    gh = np.conj(np.swapaxes(g, -1, -2))
    c = g @ gh
    c[..., 0, 0] += noise_var
    c[..., 1, 1] += noise_var
    wc = gh @ inv2_stack(c)  # MMSE combiner rows, one per layer
    a = wc @ g
    diag = np.einsum("...ll->...l", a)
    signal = np.abs(diag) ** 2
    interf = np.sum(np.abs(a) ** 2, axis=-1) - signal
    denom = interf + noise_var * np.sum(np.abs(wc) ** 2, axis=-1)
    sinr = np.divide(signal, denom, out=np.zeros_like(signal), where=denom > 0.0)
    return LayerSinrs(sinr, signal, denom)


def layer_sinrs(h, w, noise_var: float) -> LayerSinrs:
    """Per-layer linear MMSE SINR for one subcarrier and one precoder.

    Parameters
    ----------
    h : array_like
        Channel matrix, shape ``(2, n_tx)``.
    w : array_like
        Precoder, shape ``(n_tx, n_layers)``.
    noise_var : float
        Per-antenna noise variance (0 means noise free).

    Returns
    -------
    LayerSinrs
        SINR per layer plus the (signal, interference+noise) powers whose
        ratio it is; wideband aggregation sums the two parts separately.
    """
    if noise_var < 0:
        raise ValueError(f"noise_var must be >= 0, got {noise_var}")
    h = np.asarray(h, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != 2:
        raise ValueError(f"channel must be (2, n_tx), got {h.shape}")
    if w.ndim != 2 or w.shape[0] != h.shape[1]:
        raise ValueError(f"precoder shape {w.shape} does not match channel {h.shape}")
    split = _split_batch((h @ w)[None], noise_var)
    return LayerSinrs(split.sinr[0], split.signal[0], split.noise_interf[0])


def grid_layer_sinrs(grid: ChannelGrid, w, noise_var: float) -> np.ndarray:
    """Per-layer linear SINRs across a grid's evaluated subcarriers.

    Returns shape ``(n_eval, n_layers)`` where ``n_eval`` is 1 for flat
    grids (every subcarrier is identical, so one row carries the band).
    """
    w = np.asarray(w, dtype=np.complex128)
    return _split_batch(grid.eval_matrices() @ w, noise_var).sinr


def select_pmi(grid: ChannelGrid, rank: int, noise_var: float,
               cb: PrecoderCodebook,
               sinr_clamp_db: tuple[int, int] = (DB_FLOOR, DB_CEIL),
               ) -> tuple[PmiIndex, int]:
    """Exhaustive codebook search maximizing the wideband SINR.

    Signal and interference+noise powers are accumulated separately over
    all subcarriers and layers; the candidate with the highest ratio of
    the two sums wins.  Candidates within ``PMI_TIE_REL_TOL`` (relative)
    of the maximum count as tied and the lowest enumeration index is
    returned, so float noise between matrices that are equivalent in
    exact arithmetic cannot flip the choice.

    Returns the winning index and the integer-dB quantized wideband SINR.
    """
    if cb.rank != rank:
        raise ConfigurationError(f"codebook rank {cb.rank} != requested rank {rank}")
    if cb.ports != grid.n_tx:
        raise ConfigurationError(f"codebook ports {cb.ports} != channel n_tx {grid.n_tx}")
    mats = grid.eval_matrices()
    stack = np.stack([w for _, w in cb.entries])  # (n_cand, n_tx, rank)
    g = np.einsum("sij,cjl->csil", mats, stack)
    split = _split_batch(g, noise_var)
    sig = split.signal.sum(axis=(1, 2))
    nin = split.noise_interf.sum(axis=(1, 2))
    ratios = np.divide(sig, nin, out=np.zeros_like(sig), where=nin > 0.0)
    best = float(np.max(ratios))
    winner = int(np.argmax(ratios >= best - PMI_TIE_REL_TOL * abs(best)))
    idx = cb.entries[winner][0]
    return idx, lin_to_int_db(float(ratios[winner]), *sinr_clamp_db)


# Wideband integer SINR (dB) -> CQI, per reporting rank.  Outside the
# listed band everything at or below 2 dB floors at CQI 4; above the top
# the report saturates (15 for one layer, 13 for two).
_CQI_FROM_SINR_RANK1 = {
    3: 5, 4: 6, 5: 6, 6: 7, 7: 7, 8: 8, 9: 8, 10: 9, 11: 10, 12: 10,
    13: 11, 14: 11, 15: 11, 16: 12, 17: 13, 18: 13, 19: 14,
}
_CQI_FROM_SINR_RANK2 = {
    3: 5, 4: 6, 5: 6, 6: 7, 7: 7, 8: 8, 9: 8, 10: 9, 11: 9, 12: 10,
    13: 10, 14: 11, 15: 11, 16: 12, 17: 12, 18: 12, 19: 12, 20: 12, 21: 12,
}


def select_cqi(wideband_sinr_db: int, ri: int) -> int:
    """CQI from the integer wideband SINR, per reporting rank.

    Total over all integers: below the table it floors at 4, above it
    saturates at 15 (rank 1) or 13 (rank 2), and it is nondecreasing in
    the SINR.
    """
    if ri not in (1, 2):
        raise ValueError(f"ri must be 1 or 2, got {ri}")
    sinr = int(wideband_sinr_db)
    if sinr <= 2:
        return 4
    if ri == 1:
        return _CQI_FROM_SINR_RANK1.get(sinr, 15)
    return _CQI_FROM_SINR_RANK2.get(sinr, 13)


def make_report(grid: ChannelGrid, noise_var: float, cfg: CsiConfig,
                codebooks: Mapping[tuple[int, int], PrecoderCodebook]) -> CsiReport:
    """Full UE feedback for one coherence block: RI, PMI, SINR, CQI.

    ``codebooks`` maps ``(ports, rank)`` to prebuilt codebooks covering
    the grid's port count at both ranks.
    """
    ri = compute_ri(grid, cfg)
    cb = codebooks[(grid.n_tx, ri)]
    pmi, sinr_db = select_pmi(grid, ri, noise_var, cb, cfg.sinr_clamp_db)
    cqi = cfg.force_cqi if cfg.force_cqi is not None else select_cqi(sinr_db, ri)
    return CsiReport(ri=ri, pmi=pmi, wideband_sinr_db=sinr_db, cqi=cqi)
