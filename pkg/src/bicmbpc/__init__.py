"""Bit-interleaved coded multiple beamforming with perfect coding (BICMB-PC).

Link-level simulation of convolutionally coded SVD-MIMO links carrying
perfect space-time block codes, with a fully precoded (BICMB-FP) baseline
and multiplication-counting sphere-decoded bit metrics.
"""

__version__ = "0.1.0"
