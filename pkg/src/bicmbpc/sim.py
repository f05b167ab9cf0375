"""Monte Carlo BER and complexity sweeps for BICMB-PC and BICMB-FP.

Frames are the unit of work.  Frame ``t`` draws its information bits,
channel, filler bits and unit-variance noise, in that order, from its own
stream ``SeedSequence(seed, spawn_key=(t,))``; the noise is scaled by the
SNR afterwards, so every SNR point sees the same frames.  Frames are
processed in fixed-size chunks and tallies are merged strictly in chunk
order, which makes the result independent of the number of workers.
"""

from __future__ import annotations

import dataclasses
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__
from .bicm import bits_per_block, build_frame, deinterleave, make_constellation, make_interleaver
from .channel import complex_gaussian, db_to_linear
from .convcode import ConvCodeSpec, coded_length, depuncture, viterbi_decode
from .detector import (
    REALNESS_TOL,
    DetectorContext,
    MultCounter,
    axis_exhaustive_mults,
    batch_axis_metrics,
    batch_complex_metrics,
    complex_exhaustive_mults,
    group_metrics_sd,
    qr_batch,
    qr_mults,
    rotation_mults,
)
from .errors import ConfigError, InternalConsistencyError, NotEstimableError
from .pstbc import encode_batch, extract_groups, make_params, phase_matrix

__all__ = [
    "SYSTEMS",
    "SimConfig",
    "SimPoint",
    "RunReport",
    "ChunkResult",
    "simulate_chunk",
    "run_ber_sweep",
    "run_complexity_sweep",
    "run_fp_baseline",
    "estimate_diversity_slope",
]

SYSTEMS = ("bicmb-pc", "bicmb-fp")
RATES = (Fraction(1, 2), Fraction(2, 3), Fraction(4, 5))
MAX_EXHAUSTIVE_CANDIDATES = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    system: str = "bicmb-pc"
    dim: int = 2
    m: int = 4
    rate: str = "2/3"
    frame_bits: int = 1024
    snr_db: tuple[float, ...] = (0.0, 4.0, 8.0, 12.0, 16.0)
    min_errors: int = 200
    max_frames: int = 200_000
    seed: int = 0
    workers: int = 1
    detector: str = "exhaustive"
    noise: bool = True
    chunk_frames: int = 32
    interleaver_seed: int = 12345

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "rate", str(Fraction(self.rate)))
        self.validate()

    def validate(self) -> None:
        if self.system not in SYSTEMS:
            raise ConfigError(f"unknown system {self.system!r}; expected one of {SYSTEMS}")
        if self.dim not in (2, 3, 4, 6):
            raise ConfigError(f"unsupported dimension {self.dim}")
        side = math.isqrt(self.m)
        if side * side != self.m or self.m < 4 or side & (side - 1):
            raise ConfigError(f"M={self.m} is not a square power-of-two QAM size")
        if Fraction(self.rate) not in RATES:
            raise ConfigError(f"unsupported code rate {self.rate}")
        if self.detector not in ("exhaustive", "sd"):
            raise ConfigError(f"unknown detector {self.detector!r}")
        if self.detector == "exhaustive":
            side_or_m = side if self.split_axes else self.m
            if side_or_m ** self.dim > MAX_EXHAUSTIVE_CANDIDATES:
                raise ConfigError("exhaustive search too large for this (D, M); use detector 'sd'")
        if self.frame_bits < 1 or self.min_errors < 0 or self.max_frames < 1:
            raise ConfigError("frame_bits and max_frames must be positive, min_errors non-negative")
        if self.workers < 1 or self.chunk_frames < 1:
            raise ConfigError("workers and chunk_frames must be positive")
        if not self.snr_db:
            raise ConfigError("empty SNR grid")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("SNR grid must be strictly increasing")

    @property
    def split_axes(self) -> bool:
        return self.system == "bicmb-pc" and self.dim in (2, 4)

    @property
    def code(self) -> ConvCodeSpec:
        return ConvCodeSpec.for_rate(self.rate)

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["snr_db"] = list(self.snr_db)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        data = dict(data)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class SimPoint:
    snr_db: float
    ber: float
    bit_errors: int
    bits: int
    frames: int
    avg_real_mults_per_bit_metric: float
    amortized_prep_mults: float
    stop_reason: str

    CSV_COLUMNS = ("snr_db", "ber", "bit_errors", "bits", "avg_real_mults_per_bit_metric",
                   "amortized_prep_mults")


@dataclass(frozen=True)
class RunReport:
    config: SimConfig
    points: tuple[SimPoint, ...]
    wall_time: float = field(default=0.0, compare=False)
    build: str = field(default="", compare=False)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "points": [dataclasses.asdict(p) for p in self.points],
            "wall_time": self.wall_time,
            "build": self.build,
        }

    def to_csv(self) -> str:
        lines = [",".join(SimPoint.CSV_COLUMNS)]
        for p in self.points:
            lines.append(",".join(repr(getattr(p, c)) for c in SimPoint.CSV_COLUMNS))
        return "\n".join(lines) + "\n"

    def write(self, csv_path=None, json_path=None) -> None:
        import json

        if csv_path:
            Path(csv_path).write_text(self.to_csv())
        if json_path:
            Path(json_path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


@dataclass
class ChunkResult:
    frames: int = 0
    bit_errors: int = 0
    bits: int = 0
    counter: MultCounter = field(default_factory=MultCounter)


@lru_cache(maxsize=None)
def _setup(dim: int, m: int, rate: str, frame_bits: int, interleaver_seed: int):
    code = ConvCodeSpec.for_rate(rate)
    n_coded = coded_length(code, frame_bits)
    constellation = make_constellation(m)
    n_blocks = -(-n_coded // bits_per_block(constellation, dim))
    return (make_params(dim), code, make_interleaver(n_coded, interleaver_seed), constellation,
            n_blocks)


def _frame_draws(cfg: SimConfig, start: int, count: int, n_blocks: int, n_pad_bits: int):
    d = cfg.dim
    info = np.empty((count, cfg.frame_bits), dtype=np.uint8)
    h = np.empty((count, d, d), dtype=np.complex128)
    pad = np.empty((count, n_pad_bits), dtype=np.uint8)
    noise = np.empty((count, n_blocks, d, d), dtype=np.complex128)
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(start + i,)))
        info[i] = rng.integers(0, 2, cfg.frame_bits, dtype=np.uint8)
        h[i] = complex_gaussian(rng, (d, d))
        pad[i] = rng.integers(0, 2, n_pad_bits, dtype=np.uint8)
        noise[i] = complex_gaussian(rng, (n_blocks, d, d))
    return info, h, pad, noise


def simulate_chunk(cfg: SimConfig, snr_db: float, start: int, count: int) -> ChunkResult:
    """Run frames ``start .. start+count-1`` end to end at one SNR."""
    params, code, interleaver, const, n_blocks = _setup(
        cfg.dim, cfg.m, cfg.rate, cfg.frame_bits, cfg.interleaver_seed)
    d = cfg.dim
    n_coded = interleaver.length
    n_pad = n_blocks * bits_per_block(const, d) - n_coded
    info, h, pad, noise = _frame_draws(cfg, start, count, n_blocks, n_pad)

    blocks = build_frame(info, code, interleaver, const, d, filler=pad).symbol_blocks

    lam = np.linalg.svd(h, compute_uv=False)  # (F, D), non-increasing
    sigma = math.sqrt(d / db_to_linear(snr_db)) if cfg.noise else 0.0
    gain = lam[:, None, :, None]
    lam_g = lam[:, :, None] * params.generator  # (F, D, D)
    q, r = qr_batch(lam_g)

    if cfg.system == "bicmb-pc":
        y = gain * encode_batch(params, blocks) + sigma * noise
        phases = np.stack([np.diag(phase_matrix(params, v)) for v in range(1, d + 1)], axis=1)
        yb = np.conj(phases) * extract_groups(y)
    else:
        # channel use v of block k carries column x_v; noise column v is its noise
        yb = gain * (params.generator @ blocks) + sigma * noise
        phases = None
    yt = np.einsum("fji,fkjv->fkvi", np.conj(q), yb)  # (F, K, v, D)
    yt = yt.reshape(count, n_blocks * d, d)

    counter = MultCounter()
    n_groups = n_blocks * d
    if cfg.split_axes:
        worst = (np.abs(r.imag).max(axis=(1, 2)) / np.linalg.norm(r, axis=(1, 2))).max()
        if worst > REALNESS_TOL:
            raise InternalConsistencyError(f"R is not real: relative imaginary part {worst:.3e}")
        r = r.real
    if cfg.detector == "exhaustive":
        if cfg.split_axes:
            gamma = batch_axis_metrics(r, yt, const)
            per_group = axis_exhaustive_mults(cfg.m, d)
        else:
            gamma = batch_complex_metrics(r, yt, const)
            per_group = complex_exhaustive_mults(cfg.m, d)
        counter.real_multiplications += count * n_groups * per_group
        counter.metrics_computed += count * n_groups * d * const.bits_per_symbol * 2
    else:
        gamma = np.empty((count, n_groups, d, const.bits_per_symbol, 2))
        for f in range(count):
            ctx = DetectorContext(dim=d, q=q[f], r=r[f], r_is_real=cfg.split_axes,
                                  split_axes=cfg.split_axes, phases=phases, constellation=const,
                                  groups=(), prep_mults=qr_mults(d))
            for g in range(n_groups):
                gamma[f, g] = group_metrics_sd(ctx, yt[f, g], counter)
    if phases is None:
        rot = d * rotation_mults(d)
    else:
        rot = sum(rotation_mults(d, phases[:, v]) for v in range(d))
    counter.prep_multiplications += count * (qr_mults(d) + n_blocks * rot)

    metrics = gamma.reshape(count, -1, 2)[:, :n_coded]
    metrics = deinterleave(interleaver, metrics, axis=-2)
    n_steps = cfg.frame_bits + code.tail
    decoded = viterbi_decode(code, depuncture(code, metrics, n_steps))
    errors = int(np.count_nonzero(decoded != info))
    return ChunkResult(count, errors, count * cfg.frame_bits, counter)


def _chunk_plan(cfg: SimConfig):
    start = 0
    while start < cfg.max_frames:
        n = min(cfg.chunk_frames, cfg.max_frames - start)
        yield start, n
        start += n


def _run_point(cfg: SimConfig, snr_db: float, pool) -> SimPoint:
    total = ChunkResult()
    plan = _chunk_plan(cfg)
    done = False
    while not done:
        batch = [c for _, c in zip(range(cfg.workers), plan)]
        if not batch:
            break
        if pool is None:
            results = (simulate_chunk(cfg, snr_db, s, n) for s, n in batch)
        else:
            results = pool.map(simulate_chunk, [cfg] * len(batch), [snr_db] * len(batch),
                               [s for s, _ in batch], [n for _, n in batch])
        for res in results:
            total.frames += res.frames
            total.bit_errors += res.bit_errors
            total.bits += res.bits
            total.counter = total.counter.merge(res.counter)
            if total.bit_errors >= cfg.min_errors and cfg.min_errors > 0:
                done = True
                break
        if total.frames >= cfg.max_frames:
            done = True
    reason = "min_errors" if cfg.min_errors > 0 and total.bit_errors >= cfg.min_errors else "max_frames"
    c = total.counter
    return SimPoint(
        snr_db=snr_db,
        ber=total.bit_errors / total.bits,
        bit_errors=total.bit_errors,
        bits=total.bits,
        frames=total.frames,
        avg_real_mults_per_bit_metric=c.per_metric,
        amortized_prep_mults=c.prep_multiplications / c.metrics_computed if c.metrics_computed else 0.0,
        stop_reason=reason,
    )


def _build_id() -> str:
    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], capture_output=True,
                             text=True, cwd=Path(__file__).parent, timeout=5)
        if rev.returncode == 0:
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def run_ber_sweep(config: SimConfig) -> RunReport:
    """Simulate every SNR point of ``config`` until its stop rule fires."""
    config.validate()
    t0 = time.perf_counter()
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            points = tuple(_run_point(config, s, pool) for s in config.snr_db)
    else:
        points = tuple(_run_point(config, s, None) for s in config.snr_db)
    return RunReport(config, points, time.perf_counter() - t0, _build_id())


def run_complexity_sweep(config: SimConfig) -> RunReport:
    """BER sweep with the sphere decoder, reporting multiplications per bit metric."""
    return run_ber_sweep(config.replace(detector="sd"))


def run_fp_baseline(config: SimConfig) -> RunReport:
    if config.system != "bicmb-fp":
        raise ConfigError("the FP baseline needs system 'bicmb-fp'")
    return run_ber_sweep(config)


def estimate_diversity_slope(points, min_snr_db: float | None = None) -> float:
    """Least-squares BER slope in decades per 10 dB, as a positive number."""
    pts = [p for p in points if p.ber > 0 and (min_snr_db is None or p.snr_db >= min_snr_db)]
    if len(pts) < 2:
        raise NotEstimableError("need at least two points with non-zero BER")
    x = np.array([p.snr_db for p in pts])
    yv = np.log10([p.ber for p in pts])
    slope = np.polyfit(x, yv, 1)[0]
    return float(-10.0 * slope)


def sample_detector_complexity(system: str, dim: int, m: int, snr_db: float,
                               n_blocks: int, seed: int = 0) -> MultCounter:
    """Sphere-decoder cost on uncoded random blocks over fresh channels.

    After interleaving the coded bits are i.i.d., so the detector sees the
    same input statistics as in a full chain run; skipping the code lets
    large-``M`` counts be gathered in seconds.  Each block uses its own
    channel draw.
    """
    if system not in SYSTEMS:
        raise ConfigError(f"unknown system {system!r}")
    params = make_params(dim)
    const = make_constellation(m)
    split = system == "bicmb-pc" and dim in (2, 4)
    sigma = math.sqrt(dim / db_to_linear(snr_db))
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(dim, m)))
    counter = MultCounter()
    for _ in range(n_blocks):
        h = complex_gaussian(rng, (dim, dim))
        x = const.points[rng.integers(0, m, (dim, dim))]
        noise = complex_gaussian(rng, (dim, dim))
        lam = np.linalg.svd(h, compute_uv=False)
        q, r = qr_batch((lam[:, None] * params.generator)[None])
        q, r = q[0], r[0]
        if system == "bicmb-pc":
            y = lam[:, None] * encode_batch(params, x) + sigma * noise
            phases = np.stack([np.diag(phase_matrix(params, v)) for v in range(1, dim + 1)], axis=1)
            yb = np.conj(phases) * extract_groups(y)
        else:
            yb = lam[:, None] * (params.generator @ x) + sigma * noise
        yt = (np.conj(q).T @ yb).T  # row v is rotated group v
        ctx = DetectorContext(dim=dim, q=q, r=r.real if split else r, r_is_real=split,
                              split_axes=split, phases=None, constellation=const,
                              groups=(), prep_mults=qr_mults(dim))
        for v in range(dim):
            group_metrics_sd(ctx, yt[v], counter)
    return counter
