"""Kirkwood-Dirac frames built from pairs of orthonormal bases.

For bases ``{|a_i>}`` and ``{|a'_j>}`` with no vanishing cross overlap the
frame and dual operators are

    F[i, j] = |a'_j><a_i| <a'_j|a_i>
    D[i, j] = |a_i><a'_j| / <a'_j|a_i>

stored as stacks of shape ``(d*d, d, d)`` with flat index ``i * d + j``.
Composite frames are tensor products, indexed ``(i, i'; j, j'; ...)``
row-major over the elementary pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import Config, default_config
from .errors import DimensionMismatchError, OrthogonalPairError, ValidationError
from .qops import dagger

_PHASE_EPS = 1e-12


def canonical_phase(basis: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible amplitude is real positive."""
    b = np.array(basis, dtype=np.complex128)
    for k in range(b.shape[1]):
        col = b[:, k]
        nz = np.flatnonzero(np.abs(col) > _PHASE_EPS)
        if nz.size:
            x = col[nz[0]]
            b[:, k] = col * (np.conj(x) / abs(x))
            b[nz[0], k] = abs(x)
    return b


def cross_overlaps(basis_a: np.ndarray, basis_a_prime: np.ndarray) -> np.ndarray:
    """``ov[i, j] = <a'_j|a_i>``."""
    return (dagger(basis_a_prime) @ basis_a).T


@dataclass(frozen=True, eq=False)
class BasisPair:
    """Two orthonormal bases, stored as the columns of ``basis_a`` / ``basis_a_prime``."""

    dim: int
    basis_a: np.ndarray
    basis_a_prime: np.ndarray
    min_overlap: float

    @classmethod
    def from_bases(cls, basis_a, basis_a_prime, config: Config | None = None,
                   canonical: bool = True) -> "BasisPair":
        config = config or default_config()
        a = np.array(basis_a, dtype=np.complex128)
        ap = np.array(basis_a_prime, dtype=np.complex128)
        d = a.shape[0]
        if a.shape != (d, d) or ap.shape != (d, d):
            raise DimensionMismatchError(
                f"bases must both be {d}x{d} (columns are vectors), got {a.shape} and {ap.shape}"
            )
        if d > config.max_dim:
            raise ValidationError(f"dimension {d} exceeds the configured cap {config.max_dim}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(ap))):
            raise ValidationError("basis vectors must be finite")
        for name, b in (("basis_a", a), ("basis_a_prime", ap)):
            resid = float(np.max(np.abs(dagger(b) @ b - np.eye(d))))
            if resid > config.atol:
                raise ValidationError(f"{name} is not orthonormal (residual {resid:.3e})")
        if canonical:
            a, ap = canonical_phase(a), canonical_phase(ap)
        a.setflags(write=False)
        ap.setflags(write=False)
        return cls(d, a, ap, float(np.min(np.abs(cross_overlaps(a, ap)))))

    @classmethod
    def computational_fourier(cls, d: int, config: Config | None = None) -> "BasisPair":
        """Computational basis paired with the discrete Fourier basis (a MUB pair)."""
        w = np.exp(2j * np.pi / d)
        four = np.array([[w ** (r * c) for c in range(d)] for r in range(d)]) / np.sqrt(d)
        return cls.from_bases(np.eye(d), four, config)

    @classmethod
    def zx(cls) -> "BasisPair":
        """Qubit pair a = {|0>, |1>}, a' = {|+>, |->}."""
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        return cls.from_bases(np.eye(2), h)


@dataclass(frozen=True, eq=False)
class KDFrame:
    """Frame and dual operators for one (possibly composite) system.

    ``factors`` lists the elementary basis pairs; ``basis_pair`` is their
    tensor product. ``frame_ops[k]`` and ``dual_ops[k]`` follow the row-major
    order over ``(i1, i1', i2, i2', ...)``.
    """

    basis_pair: BasisPair
    frame_ops: np.ndarray
    dual_ops: np.ndarray
    factors: tuple[BasisPair, ...]

    @property
    def dim(self) -> int:
        return self.basis_pair.dim

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(p.dim for p in self.factors)

    @property
    def size(self) -> int:
        return self.frame_ops.shape[0]

    @property
    def min_overlap(self) -> float:
        return self.basis_pair.min_overlap

    @cached_property
    def index_pairs(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """For each flat index k, the per-system tuples ``(i, i')``."""
        ranges = []
        for d in self.dims:
            ranges += [range(d), range(d)]
        out = []
        for combo in itertools.product(*ranges):
            out.append((tuple(combo[0::2]), tuple(combo[1::2])))
        return out

    def traces_with(self, op: np.ndarray, ops: str = "frame") -> np.ndarray:
        """Vector of Tr[F_k op] (or Tr[op D_k] with ``ops='dual'``)."""
        op = np.asarray(op)
        if op.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"operator shape {op.shape} does not match frame dim {self.dim}")
        stack = self.frame_ops if ops == "frame" else self.dual_ops
        return np.einsum("kab,ba->k", stack, op)

    def matches(self, other: "KDFrame", atol: float = 1e-12) -> bool:
        if self is other:
            return True
        return (
            self.dims == other.dims
            and np.allclose(self.frame_ops, other.frame_ops, atol=atol, rtol=0)
        )


def _single_frame_ops(pair: BasisPair) -> tuple[np.ndarray, np.ndarray]:
    a, ap = pair.basis_a, pair.basis_a_prime
    ov = cross_overlaps(a, ap)
    # F[i, j] = |a'_j><a_i| ov[i, j]
    f = np.einsum("xj,yi,ij->ijxy", ap, a.conj(), ov)
    dd = np.einsum("xi,yj,ij->ijxy", a, ap.conj(), 1 / ov)
    d = pair.dim
    return f.reshape(d * d, d, d), dd.reshape(d * d, d, d)


def build_frame(pair: BasisPair, config: Config | None = None) -> KDFrame:
    """Construct the frame and dual for ``pair``.

    Raises:
        OrthogonalPairError: some |<a'_j|a_i>| is below ``config.overlap_floor``.
    """
    config = config or default_config()
    if pair.min_overlap < config.overlap_floor:
        ov = np.abs(cross_overlaps(pair.basis_a, pair.basis_a_prime))
        i, j = np.unravel_index(np.argmin(ov), ov.shape)
        raise OrthogonalPairError(
            f"|<a'_{j}|a_{i}>| = {ov[i, j]:.3e} is below the overlap floor {config.overlap_floor:.1e}"
        )
    f, dd = _single_frame_ops(pair)
    f.setflags(write=False)
    dd.setflags(write=False)
    return KDFrame(pair, f, dd, (pair,))


def frame_from_bases(basis_a, basis_a_prime, config: Config | None = None) -> KDFrame:
    return build_frame(BasisPair.from_bases(basis_a, basis_a_prime, config), config)


def _kron_stacks(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n, p, q = x.shape
    m, r, s = y.shape
    return np.einsum("kab,lcd->klacbd", x, y).reshape(n * m, p * r, q * s)


def tensor_frame(fa: KDFrame, fb: KDFrame) -> KDFrame:
    """Frame for the composite A (x) B with F_{k;l} = F_k (x) F_l."""
    pa, pb = fa.basis_pair, fb.basis_pair
    a = np.kron(pa.basis_a, pb.basis_a)
    ap = np.kron(pa.basis_a_prime, pb.basis_a_prime)
    a.setflags(write=False)
    ap.setflags(write=False)
    pair = BasisPair(pa.dim * pb.dim, a, ap, pa.min_overlap * pb.min_overlap)
    f = _kron_stacks(fa.frame_ops, fb.frame_ops)
    dd = _kron_stacks(fa.dual_ops, fb.dual_ops)
    f.setflags(write=False)
    dd.setflags(write=False)
    return KDFrame(pair, f, dd, fa.factors + fb.factors)


def tensor_frames(frames) -> KDFrame:
    frames = list(frames)
    out = frames[0]
    for f in frames[1:]:
        out = tensor_frame(out, f)
    return out


def duality_matrix(frame: KDFrame) -> np.ndarray:
    """``G[m, k] = Tr[F_m D_k]``; the identity for a valid frame."""
    return np.einsum("mab,kba->mk", frame.frame_ops, frame.dual_ops)


def sum_of_frame_preserves_trace(frame: KDFrame, op) -> complex:
    """Return sum_k Tr[F_k O], which equals Tr[O] for every frame."""
    return complex(np.sum(frame.traces_with(np.asarray(op, dtype=np.complex128))))
