"""Punctured convolutional coding and soft-input Viterbi decoding.

The mother code is rate 1/(number of generators).  Generators are octal
tap masks whose most significant of ``constraint_length`` bits taps the
current input.  The trellis is terminated with ``constraint_length - 1``
zero tail bits, so every encoded frame starts and ends in state 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "ConvCodeSpec",
    "mother_encode",
    "conv_encode",
    "puncture",
    "depuncture",
    "viterbi_decode",
    "coded_length",
]


@dataclass(frozen=True)
class ConvCodeSpec:
    """Mother code plus a puncturing (perforation) pattern.

    ``puncture_pattern`` has one row per generator output stream and one
    column per input bit of the puncturing period; a 1 keeps the bit.
    """

    constraint_length: int = 7
    generators: tuple[int, ...] = (0o133, 0o171)
    puncture_pattern: tuple[tuple[int, ...], ...] = ((1,), (1,))

    def __post_init__(self):
        k = self.constraint_length
        if k < 2:
            raise InvalidInputError("constraint length must be at least 2")
        if len(self.generators) < 2:
            raise InvalidInputError("need at least two generators")
        for g in self.generators:
            if not 0 < g < (1 << k):
                raise InvalidInputError(f"generator {g:o} does not fit constraint length {k}")
        pat = np.asarray(self.puncture_pattern)
        if pat.ndim != 2 or pat.shape[0] != len(self.generators) or pat.shape[1] < 1:
            raise InvalidInputError("puncture pattern must be (streams x period)")
        if not np.isin(pat, (0, 1)).all():
            raise InvalidInputError("puncture pattern must be binary")
        if (pat.sum(axis=0) == 0).any():
            raise InvalidInputError("every pattern column must keep at least one bit")

    @classmethod
    def for_rate(cls, rate) -> "ConvCodeSpec":
        """The (133, 171) code punctured to ``rate`` (1/2, 2/3 or 4/5)."""
        rate = Fraction(rate)
        patterns = {
            Fraction(1, 2): ((1,), (1,)),
            Fraction(2, 3): ((1, 1), (1, 0)),
            Fraction(4, 5): ((1, 1, 1, 1), (1, 0, 0, 0)),
        }
        if rate not in patterns:
            raise InvalidInputError(f"unsupported code rate {rate}")
        return cls(puncture_pattern=patterns[rate])

    @property
    def n_streams(self) -> int:
        return len(self.generators)

    @property
    def period(self) -> int:
        return len(self.puncture_pattern[0])

    @property
    def n_states(self) -> int:
        return 1 << (self.constraint_length - 1)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.period, int(np.sum(self.puncture_pattern)))

    @property
    def tail(self) -> int:
        return self.constraint_length - 1

    def keep_mask(self, n_steps: int) -> np.ndarray:
        """Boolean ``(n_steps, n_streams)`` mask of transmitted mother bits."""
        pat = np.asarray(self.puncture_pattern, dtype=bool).T
        reps = -(-n_steps // self.period)
        return np.tile(pat, (reps, 1))[:n_steps]

    def taps(self) -> np.ndarray:
        """``(n_streams, K)`` tap array; column ``d`` taps the input delayed by ``d``."""
        k = self.constraint_length
        return np.array([[(g >> (k - 1 - d)) & 1 for d in range(k)] for g in self.generators],
                        dtype=np.uint8)


def coded_length(spec: ConvCodeSpec, n_info: int) -> int:
    return int(spec.keep_mask(n_info + spec.tail).sum())


def mother_encode(spec: ConvCodeSpec, bits) -> np.ndarray:
    """Unpunctured encoder output of shape ``(..., n_steps, n_streams)``.

    No tail is appended here; pass already terminated input.
    """
    u = np.asarray(bits, dtype=np.uint8)
    taps = spec.taps()
    n = u.shape[-1]
    out = np.zeros(u.shape + (spec.n_streams,), dtype=np.uint8)
    for d in range(spec.constraint_length):
        if d >= n:
            break
        delayed = u[..., : n - d]
        for i in range(spec.n_streams):
            if taps[i, d]:
                out[..., d:, i] ^= delayed
    return out


def puncture(spec: ConvCodeSpec, mother) -> np.ndarray:
    mother = np.asarray(mother)
    mask = spec.keep_mask(mother.shape[-2])
    return mother[..., mask]


def depuncture(spec: ConvCodeSpec, metrics, n_steps: int) -> np.ndarray:
    """Scatter per-coded-bit metric pairs back onto the mother trellis.

    ``metrics`` has shape ``(..., n_kept, 2)``; punctured slots get the
    neutral pair ``(0, 0)``.  Returns ``(..., n_steps * n_streams, 2)``.
    """
    metrics = np.asarray(metrics, dtype=float)
    mask = spec.keep_mask(n_steps)
    if metrics.shape[-2] != mask.sum():
        raise InvalidInputError(
            f"expected {int(mask.sum())} metric pairs for {n_steps} steps, got {metrics.shape[-2]}"
        )
    full = np.zeros(metrics.shape[:-2] + (n_steps, spec.n_streams, 2))
    full[..., mask, :] = metrics
    return full.reshape(metrics.shape[:-2] + (n_steps * spec.n_streams, 2))


def conv_encode(spec: ConvCodeSpec, info_bits) -> np.ndarray:
    """Terminate, encode and puncture ``info_bits`` (shape ``(..., n)``)."""
    u = np.asarray(info_bits, dtype=np.uint8)
    if u.shape[-1] == 0:
        raise InvalidInputError("cannot encode an empty frame")
    tail = np.zeros(u.shape[:-1] + (spec.tail,), dtype=np.uint8)
    return puncture(spec, mother_encode(spec, np.concatenate([u, tail], axis=-1)))


def _trellis(spec: ConvCodeSpec):
    k = spec.constraint_length
    s = spec.n_states
    mask = s - 1
    taps = np.array(spec.generators)
    ns = np.arange(s)
    # predecessors of ns: dropping oldest bit b -> p_b = ((ns << 1) & mask) | b
    preds = np.stack([(ns << 1) & mask, ((ns << 1) & mask) | 1], axis=1)
    reg = (ns[:, None] << 1) | np.array([0, 1])[None, :]  # full K-bit register
    outs = np.zeros((s, 2, spec.n_streams), dtype=np.intp)
    for i, g in enumerate(taps):
        v = reg & g
        par = np.zeros_like(v)
        for bit in range(k):
            par ^= (v >> bit) & 1
        outs[:, :, i] = par
    return preds, outs


def viterbi_decode(spec: ConvCodeSpec, metric_pairs) -> np.ndarray:
    """Minimum-sum-weight path through the terminated trellis.

    Parameters
    ----------
    spec : ConvCodeSpec
    metric_pairs : array_like, shape (..., n_steps * n_streams, 2)
        Depunctured branch weights; ``[..., slot, b]`` is the cost of coded
        bit value ``b`` in that mother-code slot.

    Returns
    -------
    numpy.ndarray of uint8, shape (..., n_steps - constraint_length + 1)
        Decoded information bits with the tail removed.  Equal-weight
        survivors are resolved towards the lower-index predecessor state.
    """
    m = np.asarray(metric_pairs, dtype=float)
    if m.ndim < 2 or m.shape[-1] != 2 or m.shape[-2] % spec.n_streams:
        raise InvalidInputError("metric pairs must have shape (..., n_steps * n_streams, 2)")
    n_steps = m.shape[-2] // spec.n_streams
    if n_steps <= spec.tail:
        raise InvalidInputError("frame shorter than the trellis tail")
    batch_shape = m.shape[:-2]
    m = m.reshape((-1, n_steps, spec.n_streams, 2))
    nb = m.shape[0]
    preds, outs = _trellis(spec)
    s = spec.n_states
    streams = np.arange(spec.n_streams)

    pm = np.full((nb, s), np.inf)
    pm[:, 0] = 0.0
    decisions = np.empty((n_steps, nb, s), dtype=bool)
    for t in range(n_steps):
        step = m[:, t]  # (nb, streams, 2)
        # branch weight for (ns, b): sum over streams of step[stream, outs[ns, b, stream]]
        bw = step[:, streams[None, None, :], outs].sum(axis=-1)  # (nb, s, 2)
        c0 = pm[:, preds[:, 0]] + bw[:, :, 0]
        c1 = pm[:, preds[:, 1]] + bw[:, :, 1]
        pick = c1 < c0
        decisions[t] = pick
        pm = np.where(pick, c1, c0)

    bits = np.empty((nb, n_steps), dtype=np.uint8)
    state = np.zeros(nb, dtype=np.intp)
    rows = np.arange(nb)
    top = spec.constraint_length - 2
    for t in range(n_steps - 1, -1, -1):
        bits[:, t] = state >> top
        b = decisions[t, rows, state]
        state = ((state << 1) & (s - 1)) | b
    return bits[:, : n_steps - spec.tail].reshape(batch_shape + (n_steps - spec.tail,))
