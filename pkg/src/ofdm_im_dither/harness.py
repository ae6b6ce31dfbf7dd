"""Seeded Monte Carlo engine for BER sweeps and PAPR CCDF estimation.

A trial is one OFDM-IM symbol. Everything random about trial ``t`` comes
from ``derive_trial_rng(master_seed, label, t)``, so results do not depend
on how trials are chunked or spread over worker processes. BER trials reuse
the same bits, channel and unit-variance noise at every SNR point; only the
noise scale changes.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .channel import cmul, complex_noise, energy_per_bit, noise_for_eb, sample_channel
from .core import SystemConfig
from .detect import count_errors, ml_detect, power_detect
from .dither import ConstraintScheme, constraint_arrays, generate_dither_icf
from .errors import InvalidConfigError
from .modem import idft, modulate, papr

log = logging.getLogger(__name__)

BER_HEADER = ["snr_db", "bits", "bit_errors", "ber", "index_err_rate", "sym_err_rate", "measured_eb"]
CCDF_HEADER = ["papr_db", "ccdf", "samples"]


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    snr_grid_db: tuple[float, ...] = tuple(float(s) for s in range(0, 41, 5))
    # OFDM symbols per SNR point; 6250 symbols of 32 subblocks = 2e5 subblocks
    trials_per_point: int = 6250
    ccdf_symbols: int = 100_000
    master_seed: int = 0
    calibration_symbols: int = 1000
    chunk_trials: int = 250
    workers: int = 1
    detector: str = "ml"
    ccdf_step_db: float = 0.1
    ber_csv: str | None = None
    ccdf_csv: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        if self.trials_per_point < 1:
            raise InvalidConfigError("trials_per_point must be >= 1")
        if self.ccdf_symbols < 1:
            raise InvalidConfigError("ccdf_symbols must be >= 1")
        if self.chunk_trials < 1 or self.workers < 1 or self.calibration_symbols < 1:
            raise InvalidConfigError("chunk_trials, workers and calibration_symbols must be >= 1")
        if self.detector not in ("ml", "power"):
            raise InvalidConfigError(f"unknown detector {self.detector!r}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise InvalidConfigError("master_seed must be a 64-bit unsigned integer")
        if not self.ccdf_step_db > 0:
            raise InvalidConfigError("ccdf_step_db must be positive")
        ConstraintScheme.from_config(self.system)  # validates scheme radii

    @property
    def scheme(self) -> ConstraintScheme:
        return ConstraintScheme.from_config(self.system)


@dataclass(frozen=True)
class BerRecord:
    snr_db: float
    bits_sent: int
    bit_errors: int
    index_errors: int
    symbol_errors: int
    subblocks: int
    measured_eb: float

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent

    @property
    def index_error_rate(self) -> float:
        return self.index_errors / self.subblocks

    @property
    def symbol_error_rate(self) -> float:
        return self.symbol_errors / self.subblocks


@dataclass(frozen=True)
class CcdfRecord:
    papr_db: float
    ccdf: float
    samples: int


@dataclass
class BerRun:
    records: list[BerRecord]
    metadata: dict


@dataclass
class CcdfRun:
    records: list[CcdfRecord]
    papr_db: np.ndarray
    metadata: dict


def _label_key(label: str) -> int:
    return int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "little")


def derive_trial_rng(master_seed: int, stream_label: str, trial_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(_label_key(stream_label), trial_index))
    return np.random.Generator(np.random.PCG64(ss))


def draw_trials(cfg: ExperimentConfig, label: str, start: int, stop: int, with_channel: bool = True):
    """Per-trial bits, channel responses and unit noise for trials ``[start, stop)``."""
    sysc = cfg.system
    B = stop - start
    bits = np.empty((B, sysc.m), dtype=np.uint8)
    H = np.empty((B, sysc.N), dtype=complex) if with_channel else None
    Z = np.empty((B, sysc.N), dtype=complex) if with_channel else None
    for j, t in enumerate(range(start, stop)):
        rng = derive_trial_rng(cfg.master_seed, label, t)
        bits[j] = rng.integers(0, 2, sysc.m, dtype=np.uint8)
        if with_channel:
            H[j] = sample_channel(sysc.taps, sysc.N, rng)
            Z[j] = complex_noise(rng, sysc.N)
    return bits, H, Z


def transmit(bits: np.ndarray, cfg: ExperimentConfig):
    """Modulate a batch of bit vectors and add the configured dither."""
    batch = modulate(bits, cfg.system)
    D = generate_dither_icf(batch.X, constraint_arrays(batch, cfg.scheme, cfg.system), cfg.system)
    return batch, batch.X + D


def measure_eb(cfg: ExperimentConfig) -> float:
    """Pre-measured energy per bit of the scheme's transmitted symbols, dither included."""
    energies = []
    for start in range(0, cfg.calibration_symbols, cfg.chunk_trials):
        stop = min(start + cfg.chunk_trials, cfg.calibration_symbols)
        bits, _, _ = draw_trials(cfg, "eb-calibration", start, stop, with_channel=False)
        _, X_tx = transmit(bits, cfg)
        energies.extend(np.sum(X_tx.real ** 2 + X_tx.imag ** 2, axis=-1).tolist())
    return math.fsum(energies) / len(energies) / cfg.system.m


def _ber_chunk(cfg: ExperimentConfig, start: int, stop: int, eb: float) -> np.ndarray:
    bits, H, Z = draw_trials(cfg, "ber", start, stop)
    batch, X_tx = transmit(bits, cfg)
    detector = ml_detect if cfg.detector == "ml" else power_detect
    rx = cmul(H, X_tx)
    counts = np.zeros((len(cfg.snr_grid_db), 3), dtype=np.int64)
    for s, snr in enumerate(cfg.snr_grid_db):
        Y = rx + math.sqrt(noise_for_eb(snr, eb)) * Z
        sap, labels, _ = detector(Y, H, cfg.system)
        counts[s] = count_errors(batch.sap, batch.labels, sap, labels, cfg.system)
    return counts


def _papr_chunk(cfg: ExperimentConfig, start: int, stop: int) -> np.ndarray:
    bits, _, _ = draw_trials(cfg, "papr", start, stop, with_channel=False)
    _, X_tx = transmit(bits, cfg)
    return np.atleast_1d(papr(idft(X_tx, cfg.system.oversample)))


def _chunks(total: int, size: int):
    return [(a, min(a + size, total)) for a in range(0, total, size)]


def _map_chunks(fn, cfg: ExperimentConfig, spans, *extra):
    if cfg.workers == 1 or len(spans) == 1:
        return [fn(cfg, a, b, *extra) for a, b in spans]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(fn, cfg, a, b, *extra) for a, b in spans]
        return [f.result() for f in futures]


def _metadata(cfg: ExperimentConfig, **extra) -> dict:
    sysc = cfg.system
    meta = {
        "config": asdict(cfg),
        "derived": {"g": sysc.g, "p1": sysc.p1, "p2": sysc.p2, "p": sysc.p, "m": sysc.m},
        "scheme_radii": list(cfg.scheme.radii),
        "clip_ratio": sysc.clip_ratio,
        "papr_normalisation": "per-symbol mean power of the transmitted (dithered) samples",
        "tap_power_profile": "uniform",
        "fading": "block, independent per OFDM symbol",
        "code_version": __version__,
        "kernel_backend": _backend.BACKEND,
        "seed": cfg.master_seed,
    }
    meta.update(extra)
    return meta


def run_ber_sweep(cfg: ExperimentConfig, out_path: str | Path | None = None) -> BerRun:
    if not cfg.snr_grid_db:
        raise InvalidConfigError("snr_grid_db is empty")
    eb = measure_eb(cfg)
    log.info("scheme=%s measured Eb=%.6f", cfg.system.scheme, eb)
    spans = _chunks(cfg.trials_per_point, cfg.chunk_trials)
    counts = sum(_map_chunks(_ber_chunk, cfg, spans, eb))
    sysc = cfg.system
    records = [
        BerRecord(snr, cfg.trials_per_point * sysc.m, int(c[0]), int(c[1]), int(c[2]),
                  cfg.trials_per_point * sysc.g, eb)
        for snr, c in zip(cfg.snr_grid_db, counts)
    ]
    run = BerRun(records, _metadata(cfg, measured_eb=eb))
    out_path = out_path if out_path is not None else cfg.ber_csv
    if out_path is not None:
        write_ber_csv(records, out_path)
        write_metadata(run.metadata, out_path)
    return run


def empirical_ccdf(samples: np.ndarray, step_db: float = 0.1) -> list[CcdfRecord]:
    samples = np.sort(np.asarray(samples, dtype=float))
    n = len(samples)
    top = math.ceil(samples[-1] / step_db) + 1
    grid = np.round(np.arange(top + 1) * step_db, 10)
    above = n - np.searchsorted(samples, grid, side="right")
    return [CcdfRecord(float(t), int(a) / n, n) for t, a in zip(grid, above)]


def run_papr_ccdf(cfg: ExperimentConfig, out_path: str | Path | None = None) -> CcdfRun:
    spans = _chunks(cfg.ccdf_symbols, cfg.chunk_trials)
    values = np.concatenate(_map_chunks(_papr_chunk, cfg, spans))
    records = empirical_ccdf(values, cfg.ccdf_step_db)
    run = CcdfRun(records, values, _metadata(cfg))
    out_path = out_path if out_path is not None else cfg.ccdf_csv
    if out_path is not None:
        write_ccdf_csv(records, out_path)
        write_metadata(run.metadata, out_path)
    return run


def _fmt(x: float) -> str:
    return format(x, ".12g")


def write_ber_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BER_HEADER)
        for r in records:
            w.writerow([_fmt(r.snr_db), r.bits_sent, r.bit_errors, _fmt(r.ber),
                        _fmt(r.index_error_rate), _fmt(r.symbol_error_rate), _fmt(r.measured_eb)])


def write_ccdf_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CCDF_HEADER)
        for r in records:
            w.writerow([_fmt(r.papr_db), _fmt(r.ccdf), r.samples])


def write_metadata(meta: dict, csv_path):
    Path(str(csv_path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_ber_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def snr_at_ber(records, target: float) -> float:
    """SNR where the BER curve crosses ``target``, interpolating log10(BER) linearly.

    Returns ``nan`` if the curve never crosses.
    """
    pts = [(r.snr_db, r.ber) for r in records]
    for (s0, b0), (s1, b1) in zip(pts, pts[1:]):
        if b0 >= target > b1:
            if b1 == 0:
                return s1
            f = (math.log10(b0) - math.log10(target)) / (math.log10(b0) - math.log10(b1))
            return s0 + f * (s1 - s0)
    return float("nan")


def papr_at_ccdf(records, level: float) -> float:
    """PAPR threshold where the CCDF crosses ``level`` (log-linear interpolation)."""
    for r0, r1 in zip(records, records[1:]):
        if r0.ccdf >= level > r1.ccdf:
            if r1.ccdf == 0:
                return r1.papr_db
            f = (math.log10(r0.ccdf) - math.log10(level)) / (math.log10(r0.ccdf) - math.log10(r1.ccdf))
            return r0.papr_db + f * (r1.papr_db - r0.papr_db)
    return float("nan")


def with_scheme(cfg: ExperimentConfig, scheme: ConstraintScheme) -> ExperimentConfig:
    return replace(cfg, system=replace(cfg.system, scheme=scheme.tag, R_levels=scheme.radii))
