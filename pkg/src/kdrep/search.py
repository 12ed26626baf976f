"""Derivative-free search over basis pairs.

Each basis is the image of the computational basis under U = exp(iH), with
H Hermitian and built from d*d real coordinates over a fixed basis of
Hermitian matrices (diagonal units first, then for each j < k the symmetric
and antisymmetric off-diagonal units). A basis pair therefore takes 2*d*d
parameters; multi-system fragments concatenate one such block per system.

Results are heuristic. Failing to find a nonnegative frame is evidence,
not proof, that none exists, and even then the fragment may still admit a
noncontextual model outside the KD family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur
from scipy.optimize import minimize

from .config import Config, default_config
from .errors import OrthogonalPairError, OverlapFloorViolation, ValidationError
from .frame import BasisPair, KDFrame, _single_frame_ops, build_frame, cross_overlaps
from .qops import dagger
from .represent import region_margins
from .verify import Fragment, FrameSet, certify, negativity_measures

OBJECTIVES = ("fragment_negativity", "min_real_entry", "max_imag_entry")
OPTIMIZERS = ("nelder_mead", "random_search")


# --- parameterisation ------------------------------------------------------

def _hermitian_from_params(p: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=np.complex128)
    h[np.diag_indices(d)] = p[:d]
    n = d
    for j in range(d):
        for k in range(j + 1, d):
            re, im = p[n], p[n + 1]
            h[j, k] = re - 1j * im
            h[k, j] = re + 1j * im
            n += 2
    return h


def _params_from_hermitian(h: np.ndarray) -> np.ndarray:
    d = h.shape[0]
    p = list(np.real(np.diag(h)))
    for j in range(d):
        for k in range(j + 1, d):
            p += [h[j, k].real, -h[j, k].imag]
    return np.array(p)


def unitary_from_params(p, d: int) -> np.ndarray:
    """exp(iH) via the eigendecomposition of H."""
    w, v = np.linalg.eigh(_hermitian_from_params(np.asarray(p, dtype=float), d))
    return (v * np.exp(1j * w)) @ dagger(v)


def params_from_unitary(u) -> np.ndarray:
    """A parameter vector p with unitary_from_params(p) == u."""
    t, z = schur(np.asarray(u, dtype=np.complex128), output="complex")
    h = (z * np.angle(np.diag(t))) @ dagger(z)
    return _params_from_hermitian((h + dagger(h)) / 2)


@dataclass(frozen=True, eq=False)
class BasisParameterization:
    dim: int
    params: np.ndarray

    def __post_init__(self):
        if np.shape(self.params) != (2 * self.dim * self.dim,):
            raise ValidationError(f"expected {2 * self.dim ** 2} parameters for dim {self.dim}")

    @classmethod
    def encode(cls, basis_a, basis_a_prime) -> "BasisParameterization":
        a = np.asarray(basis_a, dtype=np.complex128)
        return cls(a.shape[0], np.concatenate([params_from_unitary(a), params_from_unitary(basis_a_prime)]))

    def unitaries(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.dim * self.dim
        return unitary_from_params(self.params[:n], self.dim), unitary_from_params(self.params[n:], self.dim)


def decode(p: BasisParameterization, config: Config | None = None) -> BasisPair:
    """Basis pair for ``p``.

    Raises:
        OverlapFloorViolation: some cross overlap is below the overlap floor.
    """
    config = config or default_config()
    u1, u2 = p.unitaries()
    pair = BasisPair.from_bases(u1, u2, config)
    if pair.min_overlap < config.overlap_floor:
        raise OverlapFloorViolation(
            f"decoded pair has min |overlap| {pair.min_overlap:.3e} < floor {config.overlap_floor:.1e}"
        )
    return pair


def reference_params(d: int) -> np.ndarray:
    """Parameters of the (computational, Fourier) pair."""
    ref = BasisPair.computational_fourier(d)
    return BasisParameterization.encode(ref.basis_a, ref.basis_a_prime).params


def pure_state_from_angles(angles, d: int) -> np.ndarray:
    """Hyperspherical chart: d-1 polar angles then d-1 relative phases."""
    theta, phi = angles[: d - 1], angles[d - 1:]
    mags = np.ones(d)
    for k in range(d - 1):
        mags[k] *= np.cos(theta[k])
        mags[k + 1:] *= np.sin(theta[k])
    return mags * np.exp(1j * np.concatenate([[0.0], phi]))


# --- configuration and results ---------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 20
    max_iters: int = 2000
    seed: int = 0
    objective: str = "fragment_negativity"
    optimizer: str = "nelder_mead"
    penalty_weight: float = 1e3
    penalty_floor: float | None = None

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValidationError("restarts and max_iters must be at least 1")
        if self.objective not in OBJECTIVES:
            raise ValidationError(f"objective must be one of {OBJECTIVES}")
        if self.optimizer not in OPTIMIZERS:
            raise ValidationError(f"optimizer must be one of {OPTIMIZERS}")


@dataclass
class SearchResult:
    """``best_objective`` is in natural units: a negativity total, the most
    negative real part, or the largest imaginary part."""

    best_params: np.ndarray
    best_objective: float
    best_frame: tuple[KDFrame, ...] | None
    trace: list[float]
    evaluations: int
    objective: str
    best_state: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(restart)]))


def _overlap_penalty(ov: np.ndarray, weight: float, floor: float) -> float:
    short = np.maximum(0.0, floor - np.abs(ov))
    return weight * float(np.sum(short * short))


def _minimize(fun, x0, cfg: SearchConfig, rng: np.random.Generator):
    """Minimise ``fun`` from ``x0`` within cfg.max_iters evaluations."""
    if cfg.optimizer == "nelder_mead":
        x, fx, used = np.asarray(x0, float), fun(x0), 1
        # restart the simplex around the incumbent while it keeps improving
        while used < cfg.max_iters:
            res = minimize(fun, x, method="Nelder-Mead",
                           options={"maxfev": cfg.max_iters - used, "xatol": 1e-11, "fatol": 1e-14})
            used += res.nfev
            if res.fun < fx - 1e-13:
                x, fx = res.x, float(res.fun)
            else:
                break
        return x, fx
    # (1+1) evolution strategy with the one-fifth success rule
    x, fx = np.asarray(x0, float), fun(x0)
    step = 0.5
    for _ in range(cfg.max_iters - 1):
        y = x + step * rng.standard_normal(x.size)
        fy = fun(y)
        if fy < fx:
            x, fx = y, fy
            step *= 1.5
        else:
            step *= 1.5 ** -0.25
        step = min(max(step, 1e-9), np.pi)
    return x, fx


# --- fragment search -------------------------------------------------------

def _frames_from_params(params: np.ndarray, dims, config: Config, strict: bool):
    frames, ov_all, off = [], [], 0
    for d in dims:
        n = 2 * d * d
        p = BasisParameterization(d, params[off:off + n])
        off += n
        if strict:
            frames.append(build_frame(decode(p, config), config))
        else:
            u1, u2 = p.unitaries()
            ov = cross_overlaps(u1, u2)
            ov_all.append(ov.reshape(-1))
            pair = BasisPair(d, u1, u2, float(np.min(np.abs(ov))))
            f, dd = _single_frame_ops(pair)
            frames.append(KDFrame(pair, f, dd, (pair,)))
    return frames, (np.concatenate(ov_all) if ov_all else None)


def search_nonnegative(fragment: Fragment, cfg: SearchConfig | None = None,
                       config: Config | None = None) -> SearchResult:
    """Minimise total negativity + imaginarity of ``fragment`` over frames.

    Restart 0 starts from the (computational, Fourier) pair on every system;
    later restarts start from uniformly random parameters. When the best
    objective is within ``config.nonneg_tol`` the witnessing frames are
    returned and certified.
    """
    cfg = cfg or SearchConfig()
    config = config or default_config()
    floor = config.overlap_floor if cfg.penalty_floor is None else cfg.penalty_floor
    dims = fragment.dims
    n_params = sum(2 * d * d for d in dims)
    if fragment.is_empty():
        x = np.concatenate([reference_params(d) for d in dims])
        frames, _ = _frames_from_params(x, dims, config, strict=True)
        return SearchResult(x, 0.0, tuple(frames), [0.0], 0, "fragment_negativity",
                            diagnostics={"certified": certify(fragment, frames, config=config).verdict})

    evals = 0

    def objective(x):
        nonlocal evals
        evals += 1
        frames, ov = _frames_from_params(np.asarray(x), dims, config, strict=False)
        if np.min(np.abs(ov)) == 0.0:
            return 1e12
        neg = negativity_measures(fragment, FrameSet(frames, config), config)
        val = neg.total_negativity + neg.total_imaginarity + _overlap_penalty(ov, cfg.penalty_weight, floor)
        return val if np.isfinite(val) else 1e12

    best_x, best_f, trace = None, np.inf, []
    for r in range(cfg.restarts):
        rng = _restart_rng(cfg.seed, r)
        if r == 0:
            x0 = np.concatenate([reference_params(d) for d in dims])
        else:
            x0 = rng.uniform(-np.pi, np.pi, n_params)
        x, fx = _minimize(objective, x0, cfg, rng)
        trace.append(float(fx))
        if fx < best_f:
            best_x, best_f = x, float(fx)

    diagnostics = {"heuristic": True}
    best_frames = None
    try:
        frames, _ = _frames_from_params(best_x, dims, config, strict=True)
        best_frames = tuple(frames)
    except OverlapFloorViolation as exc:
        diagnostics["frame_error"] = str(exc)
    if best_frames is not None and best_f <= config.nonneg_tol:
        diagnostics["certified"] = certify(fragment, best_frames, config=config).verdict
    return SearchResult(best_x, best_f, best_frames, trace, evals, "fragment_negativity",
                        diagnostics=diagnostics)


# --- extremal values -------------------------------------------------------

def kd_values_pure(psi: np.ndarray, basis_a: np.ndarray, basis_a_prime: np.ndarray) -> np.ndarray:
    """mu[i, j] = <a_i|psi><psi|a'_j><a'_j|a_i>, computed without a frame."""
    left = dagger(basis_a) @ psi
    right = np.conj(dagger(basis_a_prime) @ psi)
    return np.outer(left, right) * cross_overlaps(basis_a, basis_a_prime)


def search_extremal(mode: str, cfg: SearchConfig | None = None, dim: int = 2,
                    config: Config | None = None) -> SearchResult:
    """Jointly optimise (basis pair, pure state) for the extreme KD value.

    ``mode`` is ``min_real`` (most negative real part) or ``max_imag``
    (largest imaginary part). Mixed states are not searched: each KD value is
    linear in the state, so extremes sit on pure states.

    ``diagnostics`` records, over every evaluation, the smallest real part,
    largest imaginary part, largest modulus and smallest region margin seen.
    """
    if mode not in ("min_real", "max_imag"):
        raise ValueError("mode must be 'min_real' or 'max_imag'")
    objective_name = "min_real_entry" if mode == "min_real" else "max_imag_entry"
    cfg = cfg or SearchConfig(restarts=50, max_iters=4000, objective=objective_name)
    config = config or default_config()
    floor = config.overlap_floor if cfg.penalty_floor is None else cfg.penalty_floor
    d = dim
    n_basis = 2 * d * d
    n_params = n_basis + 2 * (d - 1)
    seen = {"min_real_seen": np.inf, "max_imag_seen": -np.inf,
            "max_modulus_seen": 0.0, "min_region_margin": np.inf}
    evals = 0

    def unpack(x):
        p = BasisParameterization(d, np.asarray(x[:n_basis]))
        u1, u2 = p.unitaries()
        return u1, u2, pure_state_from_angles(x[n_basis:], d)

    def objective(x):
        nonlocal evals
        evals += 1
        u1, u2, psi = unpack(x)
        mu = kd_values_pure(psi, u1, u2)
        seen["min_real_seen"] = min(seen["min_real_seen"], float(mu.real.min()))
        seen["max_imag_seen"] = max(seen["max_imag_seen"], float(mu.imag.max()))
        seen["max_modulus_seen"] = max(seen["max_modulus_seen"], float(np.abs(mu).max()))
        seen["min_region_margin"] = min(seen["min_region_margin"], float(region_margins(mu).min()))
        val = float(mu.real.min()) if mode == "min_real" else -float(mu.imag.max())
        return val + _overlap_penalty(cross_overlaps(u1, u2), cfg.penalty_weight, floor)

    best_x, best_f, trace = None, np.inf, []
    for r in range(cfg.restarts):
        rng = _restart_rng(cfg.seed, r)
        x0 = rng.uniform(-np.pi, np.pi, n_params)
        x, fx = _minimize(objective, x0, cfg, rng)
        natural = fx if mode == "min_real" else -fx
        trace.append(float(natural))
        if fx < best_f:
            best_x, best_f = x, float(fx)

    u1, u2, psi = unpack(best_x)
    best_frame = None
    try:
        best_frame = (build_frame(BasisPair.from_bases(u1, u2, config), config),)
    except OrthogonalPairError as exc:
        seen["frame_error"] = str(exc)
    mu = kd_values_pure(psi, u1, u2)
    k = np.unravel_index(np.argmin(mu.real) if mode == "min_real" else np.argmax(mu.imag), mu.shape)
    diagnostics = {key: v if isinstance(v, str) else float(v) for key, v in seen.items()}
    diagnostics["best_index"] = (int(k[0]), int(k[1]))
    diagnostics["best_value"] = complex(mu[k])
    natural = best_f if mode == "min_real" else -best_f
    return SearchResult(best_x, float(natural), best_frame, trace, evals, objective_name,
                        best_state=psi, diagnostics=diagnostics)
