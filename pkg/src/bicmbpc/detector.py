"""Receiver front end: group rotation and ML bit metrics.

Group ``v`` of a received codeword is ``y_v = Phi_v Lambda G x_v + n_v``.
With ``Lambda G = Q R`` the rotated observation
``Q^H Phi_v^H y_v = R x_v + n'`` turns every bit metric into a
``D``-dimensional closest-point problem.  For ``D`` in {2, 4} the factor
``R`` is real, so a bit that lives on the real (imaginary) axis of a QAM
symbol only needs the real (imaginary) part of the observation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bicm import Constellation
from .errors import InternalConsistencyError, InvalidInputError, UnsupportedConfigurationError
from .linalg import qr
from .pstbc import PstbcParams, group_positions, phase_matrix
from .sphere import SearchStats, search_complex, search_real

__all__ = [
    "REALNESS_TOL",
    "MultCounter",
    "DetectorContext",
    "BitMetricRequest",
    "prepare",
    "prepare_precoded",
    "rotate_group",
    "rotate_codeword",
    "bit_metric_exhaustive",
    "bit_metric_exhaustive_axis",
    "bit_metric_sd",
    "group_metrics_sd",
    "exhaustive_candidate_count",
    "axis_candidate_count",
    "qr_batch",
    "batch_axis_metrics",
    "batch_complex_metrics",
    "qr_mults",
    "rotation_mults",
    "axis_exhaustive_mults",
    "complex_exhaustive_mults",
    "codeword_bit_metric",
]

REALNESS_TOL = 1e-9


@dataclass
class MultCounter:
    """Per-worker accumulator of search effort."""

    real_multiplications: int = 0
    metrics_computed: int = 0
    candidates: int = 0
    nodes: int = 0
    prep_multiplications: int = 0

    def add_search(self, stats: SearchStats) -> None:
        self.real_multiplications += stats.mults
        self.candidates += stats.leaves
        self.nodes += stats.nodes

    def merge(self, other: "MultCounter") -> "MultCounter":
        return MultCounter(
            self.real_multiplications + other.real_multiplications,
            self.metrics_computed + other.metrics_computed,
            self.candidates + other.candidates,
            self.nodes + other.nodes,
            self.prep_multiplications + other.prep_multiplications,
        )

    @property
    def per_metric(self) -> float:
        return self.real_multiplications / self.metrics_computed if self.metrics_computed else 0.0


@dataclass(frozen=True)
class DetectorContext:
    dim: int
    q: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    r_is_real: bool
    split_axes: bool
    phases: np.ndarray = field(repr=False)  # [u, v-1] = phi_{v,u}
    constellation: Constellation = field(repr=False)
    groups: tuple = field(repr=False)
    prep_mults: int = 0


@dataclass(frozen=True)
class BitMetricRequest:
    """Metric for bit ``j`` of entry ``n`` (0-based) of the rotated group ``y_tilde``."""

    y_tilde: np.ndarray
    n: int
    j: int
    b: int


def qr_mults(dim: int) -> int:
    """Real multiplications for ``Lambda G`` plus a complex Gram-Schmidt QR."""
    return 2 * dim * dim + 4 * dim * dim * (dim - 1) + 4 * dim * dim


def rotation_mults(dim: int, phases: np.ndarray | None = None) -> int:
    """Real multiplications for ``Q^H Phi_v^H y`` on one group."""
    extra = 0 if phases is None else 4 * int(np.count_nonzero(phases != 1))
    return 4 * dim * dim + extra


def prepare(lam, params: PstbcParams, constellation: Constellation, *,
            split_axes: bool = True) -> DetectorContext:
    """Factor ``Lambda G`` for one channel realization.

    For ``D`` in {2, 4} the triangular factor must be real; a violation of
    more than ``REALNESS_TOL`` (relative) raises
    :class:`InternalConsistencyError`.
    """
    gains = _gains(lam, params.dim)
    if not (np.all(gains > 0) and np.all(np.diff(gains) <= 0)):
        raise InvalidInputError("Lambda must be positive and non-increasing")
    d = params.dim
    f = qr(gains[:, None] * params.generator)
    real_structured = d in (2, 4)
    if real_structured:
        _check_real(f.r)
    phases = np.stack([np.diag(phase_matrix(params, v)) for v in range(1, d + 1)], axis=1)
    r = f.r.real.copy() if real_structured else f.r
    return DetectorContext(
        dim=d, q=f.q, r=r, r_is_real=real_structured,
        split_axes=split_axes and real_structured, phases=phases,
        constellation=constellation,
        groups=tuple(tuple(group_positions(d, v)) for v in range(1, d + 1)),
        prep_mults=qr_mults(d),
    )


def prepare_precoded(lam, precoder, constellation: Constellation) -> DetectorContext:
    """Context for a fully precoded link ``r = Lambda P x + n``.

    The search is always over the complex alphabet; no axis split.
    """
    precoder = np.asarray(precoder, dtype=np.complex128)
    d = precoder.shape[0]
    gains = _gains(lam, d)
    f = qr(gains[:, None] * precoder)
    return DetectorContext(
        dim=d, q=f.q, r=f.r, r_is_real=False, split_axes=False,
        phases=np.ones((d, d), dtype=np.complex128), constellation=constellation,
        groups=tuple(tuple((u, v) for u in range(1, d + 1)) for v in range(1, d + 1)),
        prep_mults=qr_mults(d),
    )


def _gains(lam, d: int) -> np.ndarray:
    lam = np.asarray(lam)
    gains = np.diag(lam).real if lam.ndim == 2 else lam.real
    if gains.shape != (d,):
        raise InvalidInputError(f"expected {d} singular values, got {gains.shape}")
    return gains.astype(float)


def _check_real(r: np.ndarray) -> None:
    worst = np.abs(r.imag).max() / np.linalg.norm(r)
    if worst > REALNESS_TOL:
        raise InternalConsistencyError(f"R is not real: relative imaginary part {worst:.3e}")


def rotate_group(ctx: DetectorContext, y_breve, v: int) -> np.ndarray:
    y_breve = np.asarray(y_breve, dtype=np.complex128)
    if y_breve.shape != (ctx.dim,):
        raise InvalidInputError(f"group vector must have length {ctx.dim}")
    if not 1 <= v <= ctx.dim:
        raise InvalidInputError(f"group index {v} outside 1..{ctx.dim}")
    return ctx.q.conj().T @ (np.conj(ctx.phases[:, v - 1]) * y_breve)


def rotate_codeword(ctx: DetectorContext, y) -> np.ndarray:
    """Rotated groups of one received codeword; column ``v-1`` is group ``v``."""
    y = np.asarray(y, dtype=np.complex128)
    d = ctx.dim
    rows = np.arange(d)
    yb = np.stack([y[rows, (rows + v) % d] for v in range(d)], axis=1)
    return ctx.q.conj().T @ (np.conj(ctx.phases) * yb)


# -- exhaustive search -------------------------------------------------------

_CHUNK = 1 << 15


def _candidate_chunks(per):
    """Yield the Cartesian product of the 1-D arrays in ``per`` as row blocks.

    Mixed-radix decoding of a running index keeps memory bounded for the
    large full-search cases.
    """
    sizes = np.array([len(a) for a in per])
    total = int(np.prod(sizes))
    radix = np.concatenate([np.cumprod(sizes[::-1])[::-1][1:], [1]])
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        digits = (idx[:, None] // radix) % sizes
        yield np.stack([per[k][digits[:, k]] for k in range(len(per))], axis=1)


def _complex_candidates(ctx: DetectorContext, n: int, j: int, b: int):
    c = ctx.constellation
    per = [c.points] * ctx.dim
    per[n] = c.subset(j, b)
    return _candidate_chunks(per)


def _axis_candidates(ctx: DetectorContext, n: int, j: int, b: int):
    c = ctx.constellation
    per = [c.pam_levels] * ctx.dim
    per[n] = c.axis_subset(j, b)
    return _candidate_chunks(per)


def _check_request(ctx: DetectorContext, req: BitMetricRequest) -> None:
    if not 0 <= req.n < ctx.dim:
        raise InvalidInputError(f"entry index {req.n} outside 0..{ctx.dim - 1}")
    if not 0 <= req.j < ctx.constellation.bits_per_symbol:
        raise InvalidInputError(f"bit index {req.j} out of range")
    if req.b not in (0, 1):
        raise InvalidInputError("bit value must be 0 or 1")


def exhaustive_candidate_count(m: int, dim: int) -> int:
    return m ** dim // 2


def axis_candidate_count(m: int, dim: int) -> int:
    return int(round(np.sqrt(m))) ** dim // 2


def bit_metric_exhaustive(ctx: DetectorContext, req: BitMetricRequest,
                          counter: MultCounter | None = None) -> float:
    """``min ||y~ - R x||^2`` over all ``x`` with bit ``j`` of ``x[n]`` equal to ``b``."""
    _check_request(ctx, req)
    y = np.asarray(req.y_tilde, dtype=np.complex128)
    best, seen = np.inf, 0
    for cand in _complex_candidates(ctx, req.n, req.j, req.b):
        diff = y[None, :] - cand @ ctx.r.T
        best = min(best, float((diff.real ** 2 + diff.imag ** 2).sum(axis=1).min()))
        seen += len(cand)
    if counter is not None:
        counter.candidates += seen
        counter.metrics_computed += 1
        counter.real_multiplications += seen * _complex_cost(ctx.dim)
    return best


def bit_metric_exhaustive_axis(ctx: DetectorContext, req: BitMetricRequest,
                               counter: MultCounter | None = None) -> float:
    """Same metric restricted to the PAM axis carrying bit ``j``."""
    if not ctx.r_is_real:
        raise UnsupportedConfigurationError("axis-separated metrics need a real R")
    _check_request(ctx, req)
    y = np.asarray(req.y_tilde, dtype=np.complex128)
    yy = y.real if ctx.constellation.axis_of(req.j) == "real" else y.imag
    best, seen = np.inf, 0
    for cand in _axis_candidates(ctx, req.n, req.j, req.b):
        best = min(best, float(np.sum((yy[None, :] - cand @ ctx.r.real.T) ** 2, axis=1).min()))
        seen += len(cand)
    if counter is not None:
        counter.candidates += seen
        counter.metrics_computed += 1
        counter.real_multiplications += seen * _axis_cost(ctx.dim)
    return best


def _axis_cost(d: int) -> int:
    return d * (d + 1) // 2 + d


def _complex_cost(d: int) -> int:
    return 4 * d * (d - 1) // 2 + 2 * d + 2 * d


def axis_exhaustive_mults(m: int, d: int) -> int:
    """Mults for all bit metrics of one group with every candidate scored once."""
    side = int(round(np.sqrt(m)))
    return 2 * side ** d * _axis_cost(d)


def complex_exhaustive_mults(m: int, d: int) -> int:
    return m ** d * _complex_cost(d)


# -- sphere decoding ---------------------------------------------------------

def _real_alphabets(ctx: DetectorContext, n: int | None = None, j: int = 0, b: int = 0):
    levels = tuple(sorted(ctx.constellation.pam_levels))
    alph = [levels] * ctx.dim
    if n is not None:
        alph[n] = tuple(sorted(ctx.constellation.axis_subset(j, b)))
    return alph


def _complex_alphabets(ctx: DetectorContext, n: int | None = None, j: int = 0, b: int = 0):
    c = ctx.constellation
    levels = tuple(sorted(c.pam_levels))
    alph = [(levels, levels)] * ctx.dim
    if n is not None:
        sub = tuple(sorted(c.axis_subset(j, b)))
        alph[n] = (sub, levels) if c.axis_of(j) == "real" else (levels, sub)
    return alph


def bit_metric_sd(ctx: DetectorContext, req: BitMetricRequest,
                  counter: MultCounter | None = None) -> float:
    """Exact bit metric by sphere decoding.

    Uses the real axis-separated search when ``ctx.split_axes`` and the
    complex search otherwise; the value equals the matching exhaustive
    metric.
    """
    _check_request(ctx, req)
    stats = SearchStats()
    y = np.asarray(req.y_tilde, dtype=np.complex128)
    if ctx.split_axes:
        yy = y.real if ctx.constellation.axis_of(req.j) == "real" else y.imag
        dist, _ = search_real(ctx.r.tolist(), yy.tolist(),
                              _real_alphabets(ctx, req.n, req.j, req.b), stats)
    else:
        dist, _ = search_complex(np.asarray(ctx.r, dtype=complex).tolist(), y.tolist(),
                                 _complex_alphabets(ctx, req.n, req.j, req.b), stats)
    if counter is not None:
        counter.add_search(stats)
        counter.metrics_computed += 1
    return dist


def group_metrics_sd(ctx: DetectorContext, y_tilde, counter: MultCounter | None = None) -> np.ndarray:
    """All ``2 * D * log2(M)`` metrics of one rotated group.

    An unconstrained search gives the ML point; its distance is the metric
    of every bit value it carries, so only the complementary hypotheses need
    a constrained search.  Returns ``gamma[n, j, b]``.
    """
    c = ctx.constellation
    q = c.bits_per_symbol
    bpa = c.bits_per_axis
    d = ctx.dim
    y = np.asarray(y_tilde, dtype=np.complex128)
    gamma = np.empty((d, q, 2))
    stats = SearchStats()
    level_label = {float(v): i for i, v in enumerate(c.pam_levels)}

    if ctx.split_axes:
        r = ctx.r.tolist()
        free = _real_alphabets(ctx)
        for axis, yy in (("real", y.real), ("imag", y.imag)):
            yl = yy.tolist()
            d_ml, x_ml = search_real(r, yl, free, stats)
            off = 0 if axis == "real" else bpa
            for n in range(d):
                lab = c.pam_labels[level_label[x_ml[n]]]
                for jj in range(bpa):
                    b_ml = int(lab[jj])
                    gamma[n, off + jj, b_ml] = d_ml
                    alph = _real_alphabets(ctx, n, off + jj, 1 - b_ml)
                    gamma[n, off + jj, 1 - b_ml], _ = search_real(r, yl, alph, stats)
    else:
        r = np.asarray(ctx.r, dtype=complex).tolist()
        yl = y.tolist()
        d_ml, x_ml = search_complex(r, yl, _complex_alphabets(ctx), stats)
        for n in range(d):
            lab_re = c.pam_labels[level_label[x_ml[n].real]]
            lab_im = c.pam_labels[level_label[x_ml[n].imag]]
            for j in range(q):
                b_ml = int(lab_re[j] if j < bpa else lab_im[j - bpa])
                gamma[n, j, b_ml] = d_ml
                alph = _complex_alphabets(ctx, n, j, 1 - b_ml)
                gamma[n, j, 1 - b_ml], _ = search_complex(r, yl, alph, stats)
    if counter is not None:
        counter.add_search(stats)
        counter.metrics_computed += gamma.size
    return gamma


# -- vectorized exhaustive metrics for Monte Carlo runs ----------------------

def qr_batch(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Stacked QR with the same non-negative real diagonal convention as :func:`qr`."""
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    r = np.conj(ph)[..., :, None] * r
    q = q * ph[..., None, :]
    return q, np.triu(r)


def _label_table(values: np.ndarray, labels: np.ndarray, d: int):
    """Candidate vectors over ``values`` and their per-coordinate label bits."""
    idx = np.array(list(itertools.product(range(len(values)), repeat=d)))
    return values[idx], labels[idx]  # (C, d), (C, d, bits)


def _min_by_label(dist: np.ndarray, lab: np.ndarray) -> np.ndarray:
    """``out[..., n, j, b] = min over candidates with lab[:, n, j] == b``."""
    _, d, nb = lab.shape
    out = np.empty(dist.shape[:-1] + (d, nb, 2))
    for n in range(d):
        for j in range(nb):
            sel = lab[:, n, j].astype(bool)
            out[..., n, j, 1] = dist[..., sel].min(axis=-1)
            out[..., n, j, 0] = dist[..., ~sel].min(axis=-1)
    return out


def batch_axis_metrics(r: np.ndarray, y_tilde: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Axis-separated exhaustive metrics.

    ``r``: real ``(F, D, D)``; ``y_tilde``: ``(F, N, D)``.  Returns
    ``(F, N, D, log2 M, 2)``.
    """
    d = r.shape[-1]
    cand, lab = _label_table(constellation.pam_levels, constellation.pam_labels, d)
    rx = np.einsum("fik,ck->fci", r, cand)  # (F, C, D)
    out = []
    for part in (y_tilde.real, y_tilde.imag):
        dist = np.sum((part[:, :, None, :] - rx[:, None]) ** 2, axis=-1)
        out.append(_min_by_label(dist, lab))
    return np.concatenate(out, axis=-2)


def batch_complex_metrics(r: np.ndarray, y_tilde: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Full complex exhaustive metrics, same layout as :func:`batch_axis_metrics`."""
    d = r.shape[-1]
    cand, lab = _label_table(constellation.points, constellation.labels, d)
    rx = np.einsum("fik,ck->fci", r, cand)
    diff = y_tilde[:, :, None, :] - rx[:, None]
    dist = np.sum(diff.real ** 2 + diff.imag ** 2, axis=-1)
    return _min_by_label(dist, lab)


def complete_axis_metrics(gamma: np.ndarray, bits_per_axis: int) -> np.ndarray:
    """Turn axis-separated metrics ``(..., D, q, 2)`` into full group distances.

    An axis metric carries only its own axis residual; adding the free minimum
    of the other axis (the same for both bit values) restores the distance.
    """
    h = bits_per_axis
    free_re = gamma[..., :h, :].min(axis=(-1, -2))
    free_im = gamma[..., h:, :].min(axis=(-1, -2))
    out = gamma.copy()
    out[..., :h, :] += free_im[..., None, None]
    out[..., h:, :] += free_re[..., None, None]
    return out


def codeword_bit_metric(ctx: DetectorContext, y, m: int, n: int, j: int, b: int,
                        method: str = "exhaustive") -> float:
    """Codeword-level metric assembled from group problems.

    ``||Y - Lambda Z||^2`` splits into one term per group, so the minimum over
    all blocks with bit ``j`` of entry ``(n, m)`` fixed is the constrained
    minimum on group ``m`` plus the free minima on the other groups.
    """
    yt = rotate_codeword(ctx, y)
    total = 0.0
    for v in range(ctx.dim):
        if method == "sd":
            g = group_metrics_sd(ctx, yt[:, v])
        else:
            g = _group_metrics_exhaustive(ctx, yt[:, v])
        if ctx.split_axes:
            g = complete_axis_metrics(g, ctx.constellation.bits_per_axis)
        total += g[n, j, b] if v == m else g[0, 0].min()
    return float(total)


def _group_metrics_exhaustive(ctx: DetectorContext, y_tilde) -> np.ndarray:
    r = ctx.r[None]
    y = np.asarray(y_tilde, dtype=np.complex128)[None, None]
    if ctx.split_axes:
        return batch_axis_metrics(r.real, y, ctx.constellation)[0, 0]
    return batch_complex_metrics(r.astype(complex), y, ctx.constellation)[0, 0]
