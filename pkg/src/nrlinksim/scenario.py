"""Scenario configuration: defaults, JSON parsing, strict validation.

A scenario is the single source of truth for one simulated system:
antenna geometry, resource grid, channel model, noise model, CSI
reporting options, PHY-abstraction knobs, and run lengths.  Parsing is
strict — unknown keys and out-of-range values are rejected with the
offending field named — so golden files cannot silently drift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from math import inf
from pathlib import Path

import numpy as np

from .channel import ChannelGrid, NoiseSpec, fixed_grid, noise_variance, rice1_grid
from .csi import CsiConfig

DEFAULT_N_PRB = 106
DEFAULT_SCS_KHZ = 30
DEFAULT_N_SLOTS = 2000
DEFAULT_N_DROPS = 20
DEFAULT_CSI_PERIOD = 10
DEFAULT_K_FACTOR = 1.0
DEFAULT_COHERENCE_SLOTS = 10
DEFAULT_MAX_HARQ_TX = 4
# Rank-dependent effective-SINR ceilings (dB) modeling the fixed receiver
# impairment floor; rank 2 pays an extra inter-layer penalty.
DEFAULT_SINR_CAP_DB = {1: 19.0, 2: 16.0}


class ScenarioError(ValueError):
    """Raised when a scenario document fails validation."""


@dataclass(frozen=True)
class ChannelModel:
    """Channel model selection: a fixed matrix or single-tap Rician fading."""

    kind: str  # "fixed" | "rice1"
    matrix: np.ndarray | None = None
    k_factor: float = DEFAULT_K_FACTOR
    coherence_slots: int = DEFAULT_COHERENCE_SLOTS

    def __post_init__(self):
        if self.kind not in ("fixed", "rice1"):
            raise ScenarioError(f"channel.type must be 'fixed' or 'rice1', got {self.kind!r}")
        if self.kind == "fixed" and self.matrix is None:
            raise ScenarioError("channel.matrix is required for a fixed channel")
        if self.k_factor < 0:
            raise ScenarioError(f"channel.k_factor must be >= 0, got {self.k_factor}")
        if self.coherence_slots < 1:
            raise ScenarioError(
                f"channel.coherence_slots must be >= 1, got {self.coherence_slots}")


@dataclass(frozen=True)
class NoiseModel:
    """Receiver-noise selection for a scenario.

    Modes: ``noise_free``; ``snr`` (per-antenna SNR target in dB, resolved
    against each block's mean channel power); ``snr_sweep`` (list of SNR
    points, expanded by the sweep driver); ``variance`` (direct noise
    variance, independent of the channel).
    """

    mode: str = "noise_free"
    snr_db: float | None = None
    snr_db_list: tuple[float, ...] = ()
    variance: float | None = None

    def __post_init__(self):
        if self.mode not in ("noise_free", "snr", "snr_sweep", "variance"):
            raise ScenarioError(f"noise.mode {self.mode!r} unknown")
        if self.mode == "snr" and self.snr_db is None:
            raise ScenarioError("noise.snr_db is required for mode 'snr'")
        if self.mode == "snr_sweep" and len(self.snr_db_list) == 0:
            raise ScenarioError("noise.snr_db_list is required for mode 'snr_sweep'")
        if self.mode == "variance" and (self.variance is None or not self.variance > 0):
            raise ScenarioError("noise.variance must be > 0 for mode 'variance'")


@dataclass(frozen=True)
class Scenario:
    """One fully-specified simulation setup."""

    channel: ChannelModel
    noise: NoiseModel = NoiseModel()
    csi: CsiConfig = CsiConfig()
    n_tx: int = 4
    n_rx: int = 2
    n_prb: int = DEFAULT_N_PRB
    scs_khz: int = DEFAULT_SCS_KHZ
    n_slots: int = DEFAULT_N_SLOTS
    n_drops: int = DEFAULT_N_DROPS
    csi_period: int = DEFAULT_CSI_PERIOD
    dl_duty_factor: float = 1.0
    seed: int = 0
    est_error_var: float = 0.0
    max_harq_tx: int = DEFAULT_MAX_HARQ_TX
    sinr_cap_db: dict[int, float] = field(
        default_factory=lambda: dict(DEFAULT_SINR_CAP_DB))
    band: str | None = None

    def __post_init__(self):
        if self.n_tx not in (2, 4):
            raise ScenarioError(f"n_tx must be 2 or 4, got {self.n_tx}")
        if self.n_rx != 2:
            raise ScenarioError(f"n_rx must be 2, got {self.n_rx}")
        if self.n_prb < 1:
            raise ScenarioError(f"n_prb must be >= 1, got {self.n_prb}")
        if self.scs_khz != 30:
            raise ScenarioError(f"scs_khz must be 30, got {self.scs_khz}")
        if self.n_slots < 1:
            raise ScenarioError(f"n_slots must be >= 1, got {self.n_slots}")
        if self.n_drops < 1:
            raise ScenarioError(f"n_drops must be >= 1, got {self.n_drops}")
        if self.csi_period < 1:
            raise ScenarioError(f"csi_period must be >= 1, got {self.csi_period}")
        if not 0.0 < self.dl_duty_factor <= 1.0:
            raise ScenarioError(
                f"dl_duty_factor must be in (0, 1], got {self.dl_duty_factor}")
        if self.seed < 0:
            raise ScenarioError(f"seed must be >= 0, got {self.seed}")
        if self.est_error_var < 0:
            raise ScenarioError(f"est_error_var must be >= 0, got {self.est_error_var}")
        if self.max_harq_tx < 1:
            raise ScenarioError(f"max_harq_tx must be >= 1, got {self.max_harq_tx}")
        if set(self.sinr_cap_db) != {1, 2}:
            raise ScenarioError("sinr_cap_db must have keys 1 and 2")
        for r, cap in self.sinr_cap_db.items():
            if not cap > 0:
                raise ScenarioError(f"sinr_cap_db[{r}] must be > 0, got {cap}")
        if self.channel.kind == "fixed":
            m = self.channel.matrix
            if m.shape != (self.n_rx, self.n_tx):
                raise ScenarioError(
                    f"channel.matrix shape {m.shape} does not match "
                    f"(n_rx, n_tx) = ({self.n_rx}, {self.n_tx})")

    @property
    def is_fading(self) -> bool:
        return self.channel.kind == "rice1"

    @property
    def coherence_slots(self) -> int | None:
        """Slots per fading block; None means one block forever (fixed)."""
        return self.channel.coherence_slots if self.is_fading else None

    def grid_for_block(self, drop_seed: int, block_id: int) -> ChannelGrid:
        """True channel grid of one coherence block of one drop."""
        if self.channel.kind == "fixed":
            return fixed_grid(self.channel.matrix, self.n_prb)
        return rice1_grid(drop_seed, self.channel.k_factor, self.n_tx,
                          self.n_prb, block_id)

    def noise_for(self, grid: ChannelGrid) -> NoiseSpec:
        """Resolve the scenario's noise model against one block's grid."""
        if self.noise.mode == "noise_free":
            return NoiseSpec("noise_free", 0.0, None)
        if self.noise.mode == "snr":
            return noise_variance(self.noise.snr_db, grid)
        if self.noise.mode == "variance":
            return NoiseSpec("variance", float(self.noise.variance), None)
        raise ScenarioError("an snr_sweep scenario must be expanded per sweep point")

    def at_snr(self, snr_db: float) -> "Scenario":
        """Copy of this scenario pinned to one SNR point."""
        return replace(self, noise=NoiseModel(mode="snr", snr_db=float(snr_db)))

    def with_forced_cqi(self, cqi: int) -> "Scenario":
        """Copy of this scenario with the reported CQI forced."""
        return replace(self, csi=replace(self.csi, force_cqi=cqi))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ScenarioError(msg)


def _check_keys(d: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(d) - allowed)
    _require(not unknown, f"unknown key(s) in {where}: {', '.join(unknown)}")


def _parse_matrix(rows, where: str) -> np.ndarray:
    """Parse a matrix given as rows of numbers or [re, im] pairs."""
    _require(isinstance(rows, list) and rows, f"{where} must be a nonempty list of rows")
    out = []
    for i, row in enumerate(rows):
        _require(isinstance(row, list) and row, f"{where}[{i}] must be a nonempty list")
        vals = []
        for j, cell in enumerate(row):
            if isinstance(cell, (int, float)) and not isinstance(cell, bool):
                vals.append(complex(cell))
            elif (isinstance(cell, list) and len(cell) == 2
                  and all(isinstance(c, (int, float)) for c in cell)):
                vals.append(complex(cell[0], cell[1]))
            else:
                raise ScenarioError(
                    f"{where}[{i}][{j}] must be a number or an [re, im] pair")
        out.append(vals)
    lens = {len(r) for r in out}
    _require(len(lens) == 1, f"{where} rows must all have the same length")
    return np.array(out, dtype=np.complex128)


def _get_num(d: dict, key: str, where: str, default, *, integer=False):
    if key not in d or d[key] is None:
        return default
    v = d[key]
    if integer:
        _require(isinstance(v, int) and not isinstance(v, bool),
                 f"{where}.{key} must be an integer")
        return v
    _require(isinstance(v, (int, float)) and not isinstance(v, bool),
             f"{where}.{key} must be a number")
    return float(v)


def _parse_channel(d, n_tx_hint: int | None) -> ChannelModel:
    if isinstance(d, str):
        # Shorthand: "channel": "rice1" means the model with all defaults.
        _require(d == "rice1", f"channel shorthand must be 'rice1', got {d!r}")
        return ChannelModel(kind="rice1")
    _require(isinstance(d, dict), "channel must be an object")
    _check_keys(d, {"type", "matrix", "k_factor", "coherence_slots"}, "channel")
    kind = d.get("type")
    _require(kind in ("fixed", "rice1"),
             f"channel.type must be 'fixed' or 'rice1', got {kind!r}")
    if kind == "fixed":
        _require("matrix" in d, "channel.matrix is required for a fixed channel")
        _require("k_factor" not in d and "coherence_slots" not in d,
                 "channel.k_factor/coherence_slots apply only to 'rice1'")
        return ChannelModel(kind="fixed", matrix=_parse_matrix(d["matrix"], "channel.matrix"))
    _require("matrix" not in d, "channel.matrix applies only to 'fixed'")
    return ChannelModel(
        kind="rice1",
        k_factor=_get_num(d, "k_factor", "channel", DEFAULT_K_FACTOR),
        coherence_slots=_get_num(d, "coherence_slots", "channel",
                                 DEFAULT_COHERENCE_SLOTS, integer=True),
    )


def _parse_noise(d) -> NoiseModel:
    if d is None:
        return NoiseModel()
    _require(isinstance(d, dict), "noise must be an object")
    _check_keys(d, {"mode", "snr_db", "snr_db_list", "variance"}, "noise")
    mode = d.get("mode", "noise_free")
    if mode == "snr_sweep":
        pts = d.get("snr_db_list")
        _require(isinstance(pts, list) and pts
                 and all(isinstance(p, (int, float)) and not isinstance(p, bool)
                         for p in pts),
                 "noise.snr_db_list must be a nonempty list of numbers")
        return NoiseModel(mode=mode, snr_db_list=tuple(float(p) for p in pts))
    return NoiseModel(
        mode=mode,
        snr_db=_get_num(d, "snr_db", "noise", None),
        variance=_get_num(d, "variance", "noise", None),
    )


def _parse_csi(d) -> CsiConfig:
    if d is None:
        return CsiConfig()
    _require(isinstance(d, dict), "csi must be an object")
    _check_keys(d, {"gamma_th", "force_ri", "force_cqi"}, "csi")
    try:
        return CsiConfig(
            gamma_th=_get_num(d, "gamma_th", "csi", 2.5),
            force_ri=_get_num(d, "force_ri", "csi", None, integer=True),
            force_cqi=_get_num(d, "force_cqi", "csi", None, integer=True),
        )
    except ValueError as e:
        raise ScenarioError(f"csi: {e}") from None


def _parse_caps(d) -> dict[int, float]:
    if d is None:
        return dict(DEFAULT_SINR_CAP_DB)
    _require(isinstance(d, dict), "sinr_cap_db must be an object")
    _check_keys(d, {"1", "2"}, "sinr_cap_db")
    caps = dict(DEFAULT_SINR_CAP_DB)
    for key, rank in (("1", 1), ("2", 2)):
        if key in d:
            v = d[key]
            if v is None:
                caps[rank] = inf  # explicit null disables the ceiling
            else:
                _require(isinstance(v, (int, float)) and not isinstance(v, bool),
                         f"sinr_cap_db.{key} must be a number or null")
                caps[rank] = float(v)
    return caps


_TOP_KEYS = {
    "n_tx", "n_rx", "n_prb", "scs_khz", "n_slots", "n_drops", "csi_period",
    "dl_duty_factor", "seed", "est_error_var", "max_harq_tx", "band",
    "channel", "noise", "csi", "sinr_cap_db",
}


def scenario_from_dict(cfg: dict) -> Scenario:
    """Build and validate a :class:`Scenario` from a parsed JSON object."""
    _require(isinstance(cfg, dict), "scenario document must be a JSON object")
    _check_keys(cfg, _TOP_KEYS, "scenario")
    _require("channel" in cfg, "scenario is missing required key 'channel'")
    channel = _parse_channel(cfg["channel"], cfg.get("n_tx"))
    n_tx = cfg.get("n_tx")
    if n_tx is None:
        # For a fixed channel the matrix width pins the port count.
        n_tx = channel.matrix.shape[1] if channel.kind == "fixed" else 4
    band = cfg.get("band")
    _require(band is None or isinstance(band, str), "band must be a string")
    try:
        return Scenario(
            channel=channel,
            noise=_parse_noise(cfg.get("noise")),
            csi=_parse_csi(cfg.get("csi")),
            n_tx=n_tx,
            n_rx=_get_num(cfg, "n_rx", "scenario", 2, integer=True),
            n_prb=_get_num(cfg, "n_prb", "scenario", DEFAULT_N_PRB, integer=True),
            scs_khz=_get_num(cfg, "scs_khz", "scenario", DEFAULT_SCS_KHZ, integer=True),
            n_slots=_get_num(cfg, "n_slots", "scenario", DEFAULT_N_SLOTS, integer=True),
            n_drops=_get_num(cfg, "n_drops", "scenario", DEFAULT_N_DROPS, integer=True),
            csi_period=_get_num(cfg, "csi_period", "scenario", DEFAULT_CSI_PERIOD,
                                integer=True),
            dl_duty_factor=_get_num(cfg, "dl_duty_factor", "scenario", 1.0),
            seed=_get_num(cfg, "seed", "scenario", 0, integer=True),
            est_error_var=_get_num(cfg, "est_error_var", "scenario", 0.0),
            max_harq_tx=_get_num(cfg, "max_harq_tx", "scenario",
                                 DEFAULT_MAX_HARQ_TX, integer=True),
            sinr_cap_db=_parse_caps(cfg.get("sinr_cap_db")),
            band=band,
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e)) from None


def parse_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario JSON file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: not valid JSON: {e}") from None
    return scenario_from_dict(cfg)
