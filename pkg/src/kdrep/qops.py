"""Dense quantum objects at small dimension: states, POVMs, Kraus channels.

Every matrix is a complex128 ``numpy.ndarray``. Composite indices are
row-major throughout: for ``A (x) B`` the pair ``(i, j)`` maps to
``i * dim_B + j``, which is exactly ``numpy.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import Config, default_config
from .errors import DimensionMismatchError, ValidationError

TRACE_PRESERVING = "trace-preserving"
TRACE_DECREASING = "trace-decreasing"
TRACE_CLASSES = (TRACE_PRESERVING, TRACE_DECREASING)


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Coerce ``x`` to a finite 2-D complex array (copied, read-only)."""
    m = np.array(x, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    m.setflags(write=False)
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def _check_dim(d: int, config: Config, what: str = "dimension") -> None:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValidationError(f"invalid {what}: {d!r}")
    if d > config.max_dim:
        raise ValidationError(
            f"{what} {d} exceeds the configured cap of {config.max_dim} (KDREP_MAX_DIM)"
        )


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the row-major composite index convention."""
    return np.kron(a, b)


def tensor_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)), initial=0.0))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    dim: int
    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, m, config: Config | None = None) -> "DensityOperator":
        config = config or default_config()
        m = as_matrix(m, "density matrix")
        d = m.shape[0]
        if m.shape != (d, d):
            raise DimensionMismatchError(f"density matrix must be square, got {m.shape}")
        _check_dim(d, config)
        tol = config.atol
        if hermiticity_residual(m) > tol:
            raise ValidationError(
                f"density matrix not Hermitian (residual {hermiticity_residual(m):.3e})"
            )
        tr = np.trace(m)
        if abs(tr - 1) > tol:
            raise ValidationError(f"density matrix trace is {tr.real:.12g}, expected 1")
        lo = float(np.min(np.linalg.eigvalsh((m + dagger(m)) / 2)))
        if lo < -tol:
            raise ValidationError(f"density matrix not positive (min eigenvalue {lo:.3e})")
        return cls(d, m)

    @classmethod
    def pure(cls, psi, config: Config | None = None) -> "DensityOperator":
        v = np.asarray(psi, dtype=np.complex128).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls.from_matrix(np.outer(v, v.conj()), config)


@dataclass(frozen=True, eq=False)
class POVM:
    dim: int
    effects: tuple[np.ndarray, ...]

    @classmethod
    def from_effects(cls, effects, config: Config | None = None) -> "POVM":
        config = config or default_config()
        mats = tuple(as_matrix(e, "effect") for e in effects)
        if not mats:
            raise ValidationError("a POVM needs at least one effect")
        d = mats[0].shape[0]
        _check_dim(d, config)
        tol = config.atol
        for k, e in enumerate(mats):
            if e.shape != (d, d):
                raise DimensionMismatchError(f"effect {k} has shape {e.shape}, expected {(d, d)}")
            if hermiticity_residual(e) > tol:
                raise ValidationError(f"effect {k} not Hermitian")
            w = np.linalg.eigvalsh((e + dagger(e)) / 2)
            if w[0] < -tol or w[-1] > 1 + tol:
                raise ValidationError(
                    f"effect {k} eigenvalues outside [0, 1]: [{w[0]:.3e}, {w[-1]:.3e}]"
                )
        resid = float(np.max(np.abs(sum(mats) - np.eye(d))))
        if resid > tol:
            raise ValidationError(f"effects do not sum to the identity (residual {resid:.3e})")
        return cls(d, mats)

    @classmethod
    def projective(cls, basis, config: Config | None = None) -> "POVM":
        """Rank-one projectors onto the columns of ``basis``."""
        b = np.asarray(basis, dtype=np.complex128)
        return cls.from_effects([np.outer(b[:, k], b[:, k].conj()) for k in range(b.shape[1])], config)


def kraus_completeness(kraus_ops: Sequence[np.ndarray]) -> np.ndarray:
    """Return sum_k K_k^dagger K_k."""
    return sum(dagger(k) @ k for k in kraus_ops)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    dim_in: int
    dim_out: int
    kraus_ops: tuple[np.ndarray, ...]
    trace_class: str = TRACE_PRESERVING

    @classmethod
    def from_kraus(
        cls,
        kraus_ops,
        trace_class: str = TRACE_PRESERVING,
        config: Config | None = None,
    ) -> "KrausChannel":
        config = config or default_config()
        ops = tuple(as_matrix(k, "Kraus operator") for k in kraus_ops)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        if trace_class not in TRACE_CLASSES:
            raise ValidationError(f"unknown trace class {trace_class!r}")
        d_out, d_in = ops[0].shape
        _check_dim(d_in, config, "input dimension")
        _check_dim(d_out, config, "output dimension")
        for k, op in enumerate(ops):
            if op.shape != (d_out, d_in):
                raise DimensionMismatchError(
                    f"Kraus operator {k} has shape {op.shape}, expected {(d_out, d_in)}"
                )
        gram = kraus_completeness(ops)
        if trace_class == TRACE_PRESERVING:
            resid = float(np.max(np.abs(gram - np.eye(d_in))))
            if resid > config.atol:
                raise ValidationError(
                    f"channel labelled trace-preserving but sum K^dag K deviates from "
                    f"the identity by {resid:.3e} (Kraus-completeness residual)"
                )
        else:
            top = float(np.max(np.linalg.eigvalsh((gram + dagger(gram)) / 2)))
            if top > 1 + config.atol:
                raise ValidationError(
                    f"trace-decreasing channel has sum K^dag K with eigenvalue {top:.12g} > 1"
                )
        return cls(d_in, d_out, ops, trace_class)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply_channel(self, rho)


def apply_channel(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Return sum_k K rho K^dagger."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatchError(
            f"channel expects a {ch.dim_in}x{ch.dim_in} input, got {rho.shape}"
        )
    ks = np.stack(ch.kraus_ops)
    return np.einsum("kab,bc,kdc->ad", ks, rho, ks.conj())


def apply_channel_many(ch: KrausChannel, rhos: np.ndarray) -> np.ndarray:
    """Apply ``ch`` to a stack of matrices with shape (n, d_in, d_in)."""
    if rhos.shape[1:] != (ch.dim_in, ch.dim_in):
        raise DimensionMismatchError(f"expected (n, {ch.dim_in}, {ch.dim_in}), got {rhos.shape}")
    ks = np.stack(ch.kraus_ops)
    return np.einsum("kab,nbc,kdc->nad", ks, rhos, ks.conj())


def adjoint_channel(ch: KrausChannel) -> KrausChannel:
    """Heisenberg-picture adjoint, with Kraus operators K_k^dagger.

    The adjoint of a trace-preserving channel is unital rather than trace
    preserving, so the result is built without the completeness check and
    labelled by the trace class of the input.
    """
    ops = tuple(as_matrix(dagger(k)) for k in ch.kraus_ops)
    return KrausChannel(ch.dim_out, ch.dim_in, ops, ch.trace_class)


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Sequential composition ``second o first``."""
    if first.dim_out != second.dim_in:
        raise DimensionMismatchError(
            f"cannot compose: first outputs dim {first.dim_out}, second takes {second.dim_in}"
        )
    ops = tuple(as_matrix(k2 @ k1) for k2 in second.kraus_ops for k1 in first.kraus_ops)
    tc = TRACE_PRESERVING
    if TRACE_DECREASING in (first.trace_class, second.trace_class):
        tc = TRACE_DECREASING
    return KrausChannel(first.dim_in, second.dim_out, ops, tc)


def tensor_channel(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Parallel composition ``a (x) b``."""
    ops = tuple(as_matrix(np.kron(ka, kb)) for ka in a.kraus_ops for kb in b.kraus_ops)
    tc = TRACE_PRESERVING
    if TRACE_DECREASING in (a.trace_class, b.trace_class):
        tc = TRACE_DECREASING
    return KrausChannel(a.dim_in * b.dim_in, a.dim_out * b.dim_out, ops, tc)


def channel_sum(channels: Sequence[KrausChannel], config: Config | None = None) -> KrausChannel:
    """The channel whose action is the sum of the given ones (e.g. instrument branches)."""
    ops = [k for ch in channels for k in ch.kraus_ops]
    gram = kraus_completeness(ops)
    d_in = channels[0].dim_in
    config = config or default_config()
    tc = TRACE_PRESERVING
    if float(np.max(np.abs(gram - np.eye(d_in)))) > config.atol:
        tc = TRACE_DECREASING
    return KrausChannel.from_kraus(ops, tc, config)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(d, d, (as_matrix(np.eye(d)),))


def unitary_channel(u) -> KrausChannel:
    u = as_matrix(u, "unitary")
    return KrausChannel(u.shape[1], u.shape[0], (u,))


def depolarizing_channel(d: int) -> KrausChannel:
    """Fully depolarizing channel rho -> Tr[rho] I/d, Kraus ops |i><j|/sqrt(d)."""
    ops = []
    for i in range(d):
        for j in range(d):
            k = np.zeros((d, d), dtype=np.complex128)
            k[i, j] = 1 / np.sqrt(d)
            ops.append(as_matrix(k))
    return KrausChannel(d, d, tuple(ops))


def swap_unitary(d_a: int, d_b: int) -> np.ndarray:
    """Permutation matrix sending |i>|j> (on A (x) B) to |j>|i> (on B (x) A)."""
    s = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    for i in range(d_a):
        for j in range(d_b):
            s[j * d_a + i, i * d_b + j] = 1
    return s


def swap_channel(d_a: int, d_b: int) -> KrausChannel:
    return unitary_channel(swap_unitary(d_a, d_b))


def classical_channel(transition, config: Config | None = None) -> KrausChannel:
    """Stochastic map diagonal in the computational basis.

    ``transition[j, i]`` is the probability of ``i -> j``; Kraus operators are
    sqrt(P(j|i)) |j><i|. Columns summing to less than one give a
    trace-decreasing operation.
    """
    p = np.asarray(transition, dtype=float)
    if np.any(p < 0):
        raise ValidationError("transition probabilities must be nonnegative")
    d_out, d_in = p.shape
    ops = []
    for j in range(d_out):
        for i in range(d_in):
            if p[j, i] > 0:
                k = np.zeros((d_out, d_in), dtype=np.complex128)
                k[j, i] = np.sqrt(p[j, i])
                ops.append(k)
    config = config or default_config()
    tc = TRACE_PRESERVING if np.allclose(p.sum(axis=0), 1, atol=config.atol) else TRACE_DECREASING
    return KrausChannel.from_kraus(ops, tc, config)


# --- sampling -------------------------------------------------------------

SAMPLE_KINDS = ("haar_unitary", "random_density", "random_pure", "random_povm", "random_channel")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary: QR of a Ginibre matrix with phase-fixed R."""
    q, r = np.linalg.qr(_ginibre(_rng(seed), d, d))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_pure_vector(d: int, seed=None) -> np.ndarray:
    v = _ginibre(_rng(seed), d, 1)[:, 0]
    return v / np.linalg.norm(v)


def sample(kind: str, dims, seed=None, config: Config | None = None, **kwargs):
    """Draw a random object of the given ``kind``.

    Args:
        kind: one of ``SAMPLE_KINDS``.
        dims: an int ``d``; for ``random_channel`` optionally ``(d_in, d_out)``.
        seed: int seed or ``numpy.random.Generator``. Fixed ints reproduce
            byte-identical output.
        **kwargs: ``outcomes`` (random_povm, default 2), ``rank``
            (random_channel environment size, default d_in * d_out).

    Returns:
        ndarray for ``haar_unitary``; DensityOperator, POVM or KrausChannel
        otherwise.
    """
    config = config or default_config()
    if kind not in SAMPLE_KINDS:
        raise ValueError(f"unknown sample kind {kind!r}; choose from {SAMPLE_KINDS}")
    dims_t = tuple(dims) if isinstance(dims, (tuple, list)) else (dims,)
    for d in dims_t:
        if not isinstance(d, (int, np.integer)) or d < 2:
            raise ValidationError(f"sampling needs dimensions >= 2, got {dims!r}")
        _check_dim(int(d), config)
    rng = _rng(seed)
    d = int(dims_t[0])

    if kind == "haar_unitary":
        return haar_unitary(d, rng)
    if kind == "random_pure":
        return DensityOperator.pure(random_pure_vector(d, rng), config)
    if kind == "random_density":
        g = _ginibre(rng, d, d)
        w = g @ dagger(g)
        return DensityOperator.from_matrix(w / np.trace(w).real, config)
    if kind == "random_povm":
        n = int(kwargs.get("outcomes", 2))
        gs = [g @ dagger(g) for g in (_ginibre(rng, d, d) for _ in range(n))]
        total = sum(gs)
        w, v = np.linalg.eigh(total)
        inv_sqrt = (v / np.sqrt(w)) @ dagger(v)
        effects = [inv_sqrt @ g @ inv_sqrt for g in gs]
        effects = [(e + dagger(e)) / 2 for e in effects]
        return POVM.from_effects(effects, config)
    # random_channel via Stinespring: Haar isometry into out (x) env, trace env
    d_in = d
    d_out = int(dims_t[1]) if len(dims_t) > 1 else d
    rank = int(kwargs.get("rank", d_in * d_out))
    u = haar_unitary(d_out * rank, rng)
    iso = u[:, :d_in].reshape(d_out, rank, d_in)
    ops = [iso[:, k, :] for k in range(rank)]
    return KrausChannel.from_kraus(ops, TRACE_PRESERVING, config)
