"""Representations of states, effects and channels in a KD frame.

    mu(k | rho)   = Tr[F_k rho]
    xi(E | k)     = Tr[E D_k]
    Gamma(m | k)  = Tr[F_m  E(D_k)]        (output frame index m)

and the inverse maps rho = sum mu D, E = sum xi F.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import Config, default_config
from .errors import DimensionMismatchError, FrameChainError, OrthogonalPrePostError
from .frame import KDFrame
from .qops import (
    TRACE_PRESERVING,
    DensityOperator,
    KrausChannel,
    apply_channel_many,
)


@dataclass(frozen=True, eq=False)
class KDStateVector:
    frame: KDFrame
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class KDEffectVector:
    frame: KDFrame
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class KDChannelMatrix:
    """``entries[m, k]`` maps input-frame index k to output-frame index m."""

    frame_in: KDFrame
    frame_out: KDFrame
    entries: np.ndarray
    trace_class: str = TRACE_PRESERVING

    def __matmul__(self, other):
        if isinstance(other, KDChannelMatrix):
            if not self.frame_in.matches(other.frame_out):
                raise FrameChainError("frame_in of the left factor differs from frame_out of the right")
            tc = self.trace_class if self.trace_class == other.trace_class else "trace-decreasing"
            return KDChannelMatrix(other.frame_in, self.frame_out, self.entries @ other.entries, tc)
        if isinstance(other, KDStateVector):
            if not self.frame_in.matches(other.frame):
                raise FrameChainError("state vector frame differs from channel input frame")
            return KDStateVector(self.frame_out, self.entries @ other.entries)
        return NotImplemented


@dataclass(frozen=True)
class KDPoint:
    """A complex value written as magnitude * exp(i * phase)."""

    magnitude: float
    phase: float

    @classmethod
    def from_complex(cls, z: complex) -> "KDPoint":
        return cls(abs(z), float(np.angle(z)))


def _matrix_of(x) -> np.ndarray:
    if isinstance(x, DensityOperator):
        return x.matrix
    return np.asarray(x, dtype=np.complex128)


def represent_state(rho, frame: KDFrame) -> KDStateVector:
    """KD distribution of ``rho`` (a DensityOperator or any square matrix)."""
    m = _matrix_of(rho)
    if m.shape != (frame.dim, frame.dim):
        raise DimensionMismatchError(f"state of shape {m.shape} does not fit a dim-{frame.dim} frame")
    return KDStateVector(frame, frame.traces_with(m, "frame"))


def represent_effect(effect, frame: KDFrame) -> KDEffectVector:
    """Dual representation of an effect: the weak values of ``effect``."""
    m = np.asarray(effect, dtype=np.complex128)
    if m.shape != (frame.dim, frame.dim):
        raise DimensionMismatchError(f"effect of shape {m.shape} does not fit a dim-{frame.dim} frame")
    return KDEffectVector(frame, frame.traces_with(m, "dual"))


def represent_channel(ch: KrausChannel, frame_in: KDFrame, frame_out: KDFrame) -> KDChannelMatrix:
    if ch.dim_in != frame_in.dim or ch.dim_out != frame_out.dim:
        raise DimensionMismatchError(
            f"channel {ch.dim_in}->{ch.dim_out} does not fit frames {frame_in.dim}->{frame_out.dim}"
        )
    images = apply_channel_many(ch, frame_in.dual_ops)
    gamma = np.einsum("mab,kba->mk", frame_out.frame_ops, images)
    return KDChannelMatrix(frame_in, frame_out, gamma, ch.trace_class)


def reconstruct_state(mu: KDStateVector) -> np.ndarray:
    return np.einsum("k,kab->ab", mu.entries, mu.frame.dual_ops)


def reconstruct_effect(xi: KDEffectVector) -> np.ndarray:
    return np.einsum("k,kab->ab", xi.entries, xi.frame.frame_ops)


@dataclass(frozen=True, eq=False)
class ReconstructedChannel:
    """Linear map X -> sum_{m,k} Gamma[m,k] Tr[F_k X] D_m."""

    gamma: KDChannelMatrix

    @property
    def dim_in(self) -> int:
        return self.gamma.frame_in.dim

    @property
    def dim_out(self) -> int:
        return self.gamma.frame_out.dim

    def __call__(self, x) -> np.ndarray:
        g = self.gamma
        coords = g.frame_in.traces_with(np.asarray(x, dtype=np.complex128), "frame")
        return np.einsum("m,mab->ab", g.entries @ coords, g.frame_out.dual_ops)

    def superoperator(self) -> np.ndarray:
        """Row-major vectorised matrix S with vec(E(X)) = S vec(X)."""
        d = self.dim_in
        cols = []
        for idx in range(d * d):
            e = np.zeros(d * d, dtype=np.complex128)
            e[idx] = 1
            cols.append(self(e.reshape(d, d)).reshape(-1))
        return np.stack(cols, axis=1)


def reconstruct_channel(gamma: KDChannelMatrix) -> ReconstructedChannel:
    return ReconstructedChannel(gamma)


def predict(xi: KDEffectVector, gammas: Sequence[KDChannelMatrix], mu: KDStateVector) -> complex:
    """Evaluate xi^T Gamma_n ... Gamma_1 mu.

    ``gammas`` is in the order the channels act (first applied first). The
    complex value is returned as is; for valid quantum inputs its imaginary
    part is round-off.
    """
    vec = mu.entries
    frame = mu.frame
    for n, g in enumerate(gammas):
        if not g.frame_in.matches(frame):
            raise FrameChainError(f"channel {n} expects a different input frame than it receives")
        vec = g.entries @ vec
        frame = g.frame_out
    if not xi.frame.matches(frame):
        raise FrameChainError("effect frame differs from the final output frame")
    return complex(xi.entries @ vec)


def weak_value(effect, pre_vec, post_vec, config: Config | None = None) -> complex:
    """<post|E|pre> / <post|pre>.

    Raises:
        OrthogonalPrePostError: |<post|pre>| below the overlap floor.
    """
    config = config or default_config()
    e = np.asarray(effect, dtype=np.complex128)
    pre = np.asarray(pre_vec, dtype=np.complex128).reshape(-1)
    post = np.asarray(post_vec, dtype=np.complex128).reshape(-1)
    if e.shape != (pre.size, pre.size) or post.size != pre.size:
        raise DimensionMismatchError("effect, pre- and post-selected vectors disagree in dimension")
    overlap = np.vdot(post, pre)
    if abs(overlap) < config.overlap_floor:
        raise OrthogonalPrePostError(f"|<post|pre>| = {abs(overlap):.3e} is below the overlap floor")
    return complex(np.vdot(post, e @ pre) / overlap)


def region_check(point: KDPoint) -> float:
    """Left side of 1 - 3|z|^(2/3) + 2|z| cos(arg z) >= 0.

    Every KD value of a quantum state lies where this is nonnegative. The
    boundary passes through -1/8 and (1 + i)/4, the values of extremal real
    and imaginary part.
    """
    r = float(point.magnitude)
    return 1.0 - 3.0 * r ** (2.0 / 3.0) + 2.0 * r * np.cos(point.phase)


def region_margins(values) -> np.ndarray:
    """Vectorised ``region_check`` over an array of complex values."""
    z = np.asarray(values, dtype=np.complex128)
    r = np.abs(z)
    return 1.0 - 3.0 * np.cbrt(r) ** 2 + 2.0 * z.real
