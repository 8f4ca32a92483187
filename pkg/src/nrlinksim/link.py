"""gNB-side link adaptation, PHY abstraction, and the closed-loop drop.

The gNB turns a CSI report into a grant (layers, precoder, MCS,
transport-block size); the PHY abstraction collapses the per-layer MMSE
SINRs into one capped effective SINR and a logistic block-error
probability anchored 1 dB above the Shannon limit of the scheme; a
single-process stop-and-wait HARQ loop produces throughput statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelGrid, estimate
from .codebook import PmiIndex, build_codebook_set, precoder_for
from .csi import CsiReport, grid_layer_sinrs, make_report
from .scenario import Scenario
from .tables import load_cqi_table, load_mcs_table

# 30 kHz subcarrier spacing -> 0.5 ms slots.
SLOT_DURATION_S = 0.5e-3
# Data resource elements per PRB per slot (12 subcarriers x 14 symbols
# minus fixed reference-signal/control overhead).
DATA_RE_PER_PRB = 156

_ACK_STREAM = 14


def mcs_from_cqi(cqi: int) -> int:
    """Highest MCS whose spectral efficiency does not exceed the CQI's.

    CQI 0 is out of range and CQI 1-2 sit below the lowest MCS
    efficiency, so all three fall back to MCS 0.  The result is
    nondecreasing in CQI even though the MCS efficiencies themselves are
    not perfectly monotone.
    """
    table = load_cqi_table()
    if not 0 <= cqi < len(table):
        raise ValueError(f"cqi must be in [0, {len(table) - 1}], got {cqi}")
    eff = table[cqi].efficiency
    best = 0
    for entry in load_mcs_table():
        if entry.efficiency <= eff:
            best = entry.index
    return best


def tb_bits(modulation_order: int, code_rate: float, n_layers: int,
            n_prb: int) -> int:
    """Transport-block size for an explicit modulation and code rate.

    ``floor(DATA_RE_PER_PRB * n_prb * n_layers * modulation_order * code_rate)``.
    """
    if n_layers not in (1, 2):
        raise ValueError(f"n_layers must be 1 or 2, got {n_layers}")
    if n_prb < 1:
        raise ValueError(f"n_prb must be >= 1, got {n_prb}")
    if not 0 < code_rate <= 1:
        raise ValueError(f"code_rate must be in (0, 1], got {code_rate}")
    return math.floor(DATA_RE_PER_PRB * n_prb * n_layers * modulation_order * code_rate)


def tbs(mcs: int, n_layers: int, n_prb: int) -> int:
    """Transport-block size in bits for one MCS table row.

    Computed in exact integer arithmetic:
    ``DATA_RE_PER_PRB * n_prb * n_layers * Qm * rate_x1024 // 1024``.
    """
    table = load_mcs_table()
    if not 0 <= mcs < len(table):
        raise ValueError(f"mcs must be in [0, {len(table) - 1}], got {mcs}")
    if n_layers not in (1, 2):
        raise ValueError(f"n_layers must be 1 or 2, got {n_layers}")
    if n_prb < 1:
        raise ValueError(f"n_prb must be >= 1, got {n_prb}")
    e = table[mcs]
    return (DATA_RE_PER_PRB * n_prb * n_layers
            * e.modulation_order * e.rate_x1024) // 1024


@dataclass(frozen=True)
class DownlinkGrant:
    """One scheduling decision: layers, precoder, MCS, transport block."""

    n_layers: int
    precoder: np.ndarray
    mcs: int
    tbs_bits: int
    n_prb: int
    pmi: PmiIndex
    cqi: int

    def __post_init__(self):
        if self.n_layers not in (1, 2):
            raise ValueError(f"n_layers must be 1 or 2, got {self.n_layers}")
        if self.precoder.shape[1] != self.n_layers:
            raise ValueError(
                f"precoder has {self.precoder.shape[1]} columns for "
                f"{self.n_layers} layers")
        if self.tbs_bits < 0:
            raise ValueError(f"tbs_bits must be >= 0, got {self.tbs_bits}")


def schedule(report: CsiReport, n_prb: int) -> DownlinkGrant:
    """Grant implied by a CSI report: follow RI/PMI, map CQI to MCS."""
    mcs = mcs_from_cqi(report.cqi)
    return DownlinkGrant(
        n_layers=report.ri,
        precoder=precoder_for(report.pmi),
        mcs=mcs,
        tbs_bits=tbs(mcs, report.ri, n_prb),
        n_prb=n_prb,
        pmi=report.pmi,
        cqi=report.cqi,
    )


def effective_sinr_db(grid: ChannelGrid, grant: DownlinkGrant,
                      noise_var: float, sinr_cap_db: dict[int, float]) -> float:
    """Mean per-layer linear SINR over the band, in dB, ceilinged per rank.

    The rank-dependent ceiling models the fixed receiver impairment that
    keeps high modulation orders from becoming error free even when the
    channel SNR grows without bound.
    """
    sinrs = grid_layer_sinrs(grid, grant.precoder, noise_var)
    mean_lin = float(np.mean(sinrs))
    cap = float(sinr_cap_db[grant.n_layers])
    if mean_lin <= 0.0:
        return -math.inf
    return min(10.0 * math.log10(mean_lin), cap)


def decode_threshold_db(mcs: int) -> float:
    """Mid-point of the logistic error curve: Shannon limit of the
    scheme's spectral efficiency plus a 1 dB implementation margin."""
    se = load_mcs_table()[mcs].efficiency
    return 10.0 * math.log10(2.0 ** se - 1.0) + 1.0


def bler(eff_sinr_db: float, mcs: int) -> float:
    """Logistic block-error probability ``1 / (1 + exp(2 (eff - th)))``.

    Decreasing in the effective SINR, 0.5 exactly at the threshold, and
    evaluated in the numerically stable branch so extreme SINRs saturate
    to 0/1 instead of overflowing.
    """
    x = 2.0 * (eff_sinr_db - decode_threshold_db(mcs))
    if x > 0:
        e = math.exp(-x)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(x))


@dataclass(frozen=True)
class ThroughputStats:
    """Per-drop accounting of one closed-loop run."""

    slots: int
    tb_attempts: int
    tb_acks: int
    delivered_bits: int
    goodput_bps: float
    mean_bler: float
    mean_mcs: float
    mean_ri: float
    mean_cqi: float

    @property
    def goodput_mbps(self) -> float:
        return self.goodput_bps / 1e6


def simulate_drop(scenario: Scenario, seed: int) -> ThroughputStats:
    """One closed-loop drop: fading blocks, periodic CSI, HARQ, accounting.

    Fully deterministic in ``(scenario, seed)``.  Per slot: advance the
    fading block if needed, refresh CSI on reporting-period boundaries
    (the UE sees the *estimated* channel, decoding uses the true one),
    transmit the pending transport block, and draw exactly one uniform
    variate against the block-error probability.  A transport block is
    retransmitted with its original grant up to ``max_harq_tx`` attempts,
    then dropped.
    """
    codebooks = build_codebook_set(scenario.n_tx)
    ack_rng = np.random.default_rng([_ACK_STREAM, seed])
    coh = scenario.coherence_slots

    cur_block = -1
    grid = noise = est = None
    report: CsiReport | None = None
    grant: DownlinkGrant | None = None
    report_block = -1
    eff_cache: dict[tuple, float] = {}

    tb_grant: DownlinkGrant | None = None
    tb_tries = 0
    attempts = acks = 0
    delivered = 0
    sum_mcs = sum_ri = sum_cqi = 0

    for slot in range(scenario.n_slots):
        block = 0 if coh is None else slot // coh
        if block != cur_block:
            cur_block = block
            grid = scenario.grid_for_block(seed, block)
            est = estimate(grid, scenario.est_error_var, seed)
            noise = scenario.noise_for(grid)
        if slot % scenario.csi_period == 0 and report_block != block:
            report = make_report(est, noise.variance, scenario.csi, codebooks)
            grant = schedule(report, scenario.n_prb)
            report_block = block

        if tb_grant is None:
            tb_grant = grant
            tb_tries = 0

        key = (block, tb_grant.pmi.key(), tb_grant.n_layers)
        eff = eff_cache.get(key)
        if eff is None:
            eff = effective_sinr_db(grid, tb_grant, noise.variance,
                                    scenario.sinr_cap_db)
            eff_cache[key] = eff
        p_err = bler(eff, tb_grant.mcs)

        attempts += 1
        tb_tries += 1
        sum_mcs += tb_grant.mcs
        sum_ri += tb_grant.n_layers
        sum_cqi += tb_grant.cqi
        if ack_rng.random() >= p_err:
            acks += 1
            delivered += tb_grant.tbs_bits
            tb_grant = None
        elif tb_tries >= scenario.max_harq_tx:
            tb_grant = None  # block dropped after the last allowed attempt

    n = scenario.n_slots
    goodput = delivered / n / SLOT_DURATION_S * scenario.dl_duty_factor
    return ThroughputStats(
        slots=n,
        tb_attempts=attempts,
        tb_acks=acks,
        delivered_bits=delivered,
        goodput_bps=goodput,
        mean_bler=(attempts - acks) / attempts if attempts else 0.0,
        mean_mcs=sum_mcs / n,
        mean_ri=sum_ri / n,
        mean_cqi=sum_cqi / n,
    )
