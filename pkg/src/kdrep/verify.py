"""Structural checks of KD representations and nonnegativity certification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import Config, default_config
from .errors import ConsistencyError, DimensionMismatchError, ValidationError
from .frame import BasisPair, KDFrame, build_frame, tensor_frame, tensor_frames
from .qops import (
    TRACE_DECREASING,
    TRACE_PRESERVING,
    DensityOperator,
    KrausChannel,
    POVM,
    compose,
    identity_channel,
    kraus_completeness,
    swap_channel,
    tensor_channel,
)
from .represent import represent_channel, represent_effect, represent_state

NONNEGATIVE = "NONNEGATIVE"
NEGATIVE = "NEGATIVE"


# --- fragments -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Instrument:
    """Trace-decreasing branches whose sum is trace preserving."""

    branches: tuple[KrausChannel, ...]
    branch_names: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class Member:
    """A named fragment object placed on a subset of the fragment's systems.

    ``systems`` are indices into ``Fragment.dims``; channels and instruments
    also carry ``systems_out``.
    """

    name: str
    value: object
    systems: tuple[int, ...]
    systems_out: tuple[int, ...] | None = None


@dataclass(frozen=True, eq=False)
class Fragment:
    dims: tuple[int, ...]
    states: tuple[Member, ...] = ()
    measurements: tuple[Member, ...] = ()
    channels: tuple[Member, ...] = ()
    instruments: tuple[Member, ...] = ()
    system_names: tuple[str, ...] = ()

    @classmethod
    def build(cls, dims, states=(), measurements=(), channels=(), instruments=(),
              system_names=None, config: Config | None = None) -> "Fragment":
        """Assemble and validate a fragment.

        Objects may be given bare (acting on every system, auto-named
        ``state0``, ``povm0``, ``channel0``, ``instrument0``...) or as
        ``Member``. Instruments given bare are sequences of KrausChannel.
        """
        config = config or default_config()
        dims = tuple(int(d) for d in (dims if isinstance(dims, (tuple, list)) else (dims,)))
        if not dims:
            raise ValidationError("a fragment needs at least one system")
        if system_names is None:
            system_names = tuple("ABCDEFGH"[k] if k < 8 else f"S{k}" for k in range(len(dims)))
        everything = tuple(range(len(dims)))

        def wrap(items, prefix, two_sided=False):
            out = []
            for n, it in enumerate(items):
                if isinstance(it, Member):
                    out.append(it)
                else:
                    if prefix == "instrument" and not isinstance(it, Instrument):
                        it = Instrument(tuple(it), tuple(f"branch{b}" for b in range(len(it))))
                    out.append(Member(f"{prefix}{n}", it, everything, everything if two_sided else None))
            return tuple(out)

        frag = cls(
            dims,
            wrap(states, "state"),
            wrap(measurements, "povm"),
            wrap(channels, "channel", True),
            wrap(instruments, "instrument", True),
            tuple(system_names),
        )
        frag.validate(config)
        return frag

    def total_dim(self, systems: Sequence[int]) -> int:
        return int(np.prod([self.dims[s] for s in systems])) if systems else 1

    def validate(self, config: Config | None = None) -> None:
        config = config or default_config()
        if int(np.prod(self.dims)) > config.max_dim:
            raise ValidationError(f"total dimension {int(np.prod(self.dims))} exceeds the cap {config.max_dim}")
        seen = set()
        for m in self.members():
            if m.name in seen:
                raise ValidationError(f"duplicate object name {m.name!r}")
            seen.add(m.name)
            for s in m.systems + (m.systems_out or ()):
                if not 0 <= s < len(self.dims):
                    raise ValidationError(f"{m.name}: system index {s} out of range")
        for m in self.states:
            if not isinstance(m.value, DensityOperator):
                raise ValidationError(f"{m.name}: states must be DensityOperator")
            if m.value.dim != self.total_dim(m.systems):
                raise DimensionMismatchError(f"{m.name}: dim {m.value.dim} != {self.total_dim(m.systems)}")
        for m in self.measurements:
            if not isinstance(m.value, POVM):
                raise ValidationError(f"{m.name}: measurements must be POVM")
            if m.value.dim != self.total_dim(m.systems):
                raise DimensionMismatchError(f"{m.name}: dim {m.value.dim} != {self.total_dim(m.systems)}")
        for m in self.channels + self.instruments:
            chans = m.value.branches if isinstance(m.value, Instrument) else (m.value,)
            for ch in chans:
                if not isinstance(ch, KrausChannel):
                    raise ValidationError(f"{m.name}: expected KrausChannel objects")
                if (ch.dim_in, ch.dim_out) != (self.total_dim(m.systems), self.total_dim(m.systems_out)):
                    raise DimensionMismatchError(
                        f"{m.name}: channel {ch.dim_in}->{ch.dim_out} does not match its systems"
                    )
        for m in self.channels:
            if m.value.trace_class != TRACE_PRESERVING:
                raise ValidationError(
                    f"{m.name}: trace-decreasing operations belong in an instrument with their complement"
                )
        for m in self.instruments:
            gram = kraus_completeness([k for b in m.value.branches for k in b.kraus_ops])
            resid = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
            if resid > config.atol:
                raise ValidationError(
                    f"{m.name}: instrument branches do not sum to a trace-preserving channel "
                    f"(residual {resid:.3e})"
                )

    def members(self):
        return self.states + self.measurements + self.channels + self.instruments

    def is_empty(self) -> bool:
        return not self.members()


class FrameSet:
    """Per-system frames for a fragment; composite frames are tensor products."""

    def __init__(self, frames, config: Config | None = None):
        config = config or default_config()
        if isinstance(frames, (KDFrame, BasisPair)):
            frames = [frames]
        self.frames = tuple(f if isinstance(f, KDFrame) else build_frame(f, config) for f in frames)
        self._cache: dict[tuple[int, ...], KDFrame] = {}

    def __len__(self):
        return len(self.frames)

    def for_systems(self, systems: Sequence[int]) -> KDFrame:
        key = tuple(systems)
        if key not in self._cache:
            self._cache[key] = tensor_frames([self.frames[s] for s in key])
        return self._cache[key]


def _frameset(fragment: Fragment, frames, config) -> FrameSet:
    fs = frames if isinstance(frames, FrameSet) else FrameSet(frames, config)
    if len(fs) != len(fragment.dims):
        raise DimensionMismatchError(f"need one frame per system ({len(fragment.dims)}), got {len(fs)}")
    for s, (d, f) in enumerate(zip(fragment.dims, fs.frames)):
        if f.dim != d:
            raise DimensionMismatchError(f"frame for system {s} has dim {f.dim}, system has dim {d}")
    return fs


@dataclass(frozen=True, eq=False)
class RepresentedObject:
    """One represented fragment object.

    ``kind`` is ``state``, ``effect``, ``channel`` or ``branch``; ``group``
    names the POVM or instrument the object belongs to.
    """

    name: str
    kind: str
    entries: np.ndarray
    frame_in: KDFrame
    frame_out: KDFrame | None = None
    group: str | None = None
    group_size: int = 1
    trace_class: str = TRACE_PRESERVING

    def label(self, flat_index: int) -> str:
        if self.entries.ndim == 1:
            return pair_label(self.frame_in, flat_index)
        m, k = np.unravel_index(flat_index, self.entries.shape)
        return f"{pair_label(self.frame_out, m)}|{pair_label(self.frame_in, k)}"


def pair_label(frame: KDFrame, k: int) -> str:
    i, ip = frame.index_pairs[k]
    return ":".join(map(str, i)) + "," + ":".join(map(str, ip))


def represent_fragment(fragment: Fragment, frames, config: Config | None = None) -> list[RepresentedObject]:
    """Represent every member, in the fragment's stable order."""
    config = config or default_config()
    fs = _frameset(fragment, frames, config)
    out = []
    for m in fragment.states:
        f = fs.for_systems(m.systems)
        out.append(RepresentedObject(m.name, "state", represent_state(m.value, f).entries, f))
    for m in fragment.measurements:
        f = fs.for_systems(m.systems)
        n = len(m.value.effects)
        for k, e in enumerate(m.value.effects):
            out.append(RepresentedObject(f"{m.name}[{k}]", "effect", represent_effect(e, f).entries, f,
                                         group=m.name, group_size=n))
    for m in fragment.channels:
        fi, fo = fs.for_systems(m.systems), fs.for_systems(m.systems_out)
        g = represent_channel(m.value, fi, fo)
        out.append(RepresentedObject(m.name, "channel", g.entries, fi, fo, trace_class=m.value.trace_class))
    for m in fragment.instruments:
        fi, fo = fs.for_systems(m.systems), fs.for_systems(m.systems_out)
        n = len(m.value.branches)
        for bname, ch in zip(m.value.branch_names, m.value.branches):
            g = represent_channel(ch, fi, fo)
            out.append(RepresentedObject(f"{m.name}[{bname}]", "branch", g.entries, fi, fo,
                                         group=m.name, group_size=n, trace_class=TRACE_DECREASING))
    return out


# --- check results ---------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    trials: int = 1
    detail: dict = field(default_factory=dict)


def _maxabs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def verify_identity_channel(frame: KDFrame, frame_out: KDFrame | None = None,
                            tol: float = 1e-9) -> CheckResult:
    """Represent the identity channel and compare with the identity matrix.

    Passing a different ``frame_out`` is expected to fail: the identity is
    only represented by the identity when input and output frames agree.
    """
    frame_out = frame if frame_out is None else frame_out
    g = represent_channel(identity_channel(frame.dim), frame, frame_out)
    dev = _maxabs(g.entries - np.eye(g.entries.shape[0]))
    return CheckResult("identity", dev <= tol, dev, tol)


def verify_sequential(ch1: KrausChannel, ch2: KrausChannel, frames, tol: float = 1e-9) -> CheckResult:
    """Gamma(ch2 o ch1) against Gamma(ch2) @ Gamma(ch1); ``frames`` = (in, mid, out)."""
    fa, fb, fc = frames
    direct = represent_channel(compose(ch2, ch1), fa, fc).entries
    product = represent_channel(ch2, fb, fc).entries @ represent_channel(ch1, fa, fb).entries
    dev = _maxabs(direct - product)
    return CheckResult("sequential", dev <= tol, dev, tol)


def verify_parallel(ch1: KrausChannel, ch2: KrausChannel, frames, tol: float = 1e-9) -> CheckResult:
    """Gamma(ch1 (x) ch2) on tensor frames against kron(Gamma1, Gamma2).

    ``frames`` = (in_1, in_2, out_1, out_2).
    """
    fa_in, fb_in, fa_out, fb_out = frames
    direct = represent_channel(
        tensor_channel(ch1, ch2), tensor_frame(fa_in, fb_in), tensor_frame(fa_out, fb_out)
    ).entries
    g1 = represent_channel(ch1, fa_in, fa_out).entries
    g2 = represent_channel(ch2, fb_in, fb_out).entries
    dev = _maxabs(direct - np.kron(g1, g2))
    return CheckResult("parallel", dev <= tol, dev, tol)


def swap_permutation(n_a: int, n_b: int) -> np.ndarray:
    """Matrix sending frame index (k; l) on A(x)B to (l; k) on B(x)A."""
    p = np.zeros((n_a * n_b, n_a * n_b))
    for k in range(n_a):
        for l in range(n_b):
            p[l * n_a + k, k * n_b + l] = 1
    return p


def verify_swap(frame_a: KDFrame, frame_b: KDFrame, tol: float = 1e-9) -> CheckResult:
    g = represent_channel(
        swap_channel(frame_a.dim, frame_b.dim), tensor_frame(frame_a, frame_b), tensor_frame(frame_b, frame_a)
    ).entries
    dev = _maxabs(g - swap_permutation(frame_a.size, frame_b.size))
    return CheckResult("swap", dev <= tol, dev, tol)


@dataclass(frozen=True)
class NormalizationReport:
    passed: bool
    max_deviation: float
    tolerance: float
    per_object: dict


def verify_normalization(fragment: Fragment, frames, tol: float = 1e-9,
                         config: Config | None = None) -> NormalizationReport:
    """Sum rules: state sums, unit-effect, POVM completeness, column sums.

    Each state sums to 1; the unit effect is all ones in every frame used;
    the effects of each POVM add to all ones; trace-preserving channels and
    the branch sum of each instrument have unit column sums.
    """
    config = config or default_config()
    reps = represent_fragment(fragment, frames, config)
    per: dict[str, float] = {}
    groups: dict[str, list[RepresentedObject]] = {}
    frames_used: dict[int, KDFrame] = {}
    for r in reps:
        frames_used[id(r.frame_in)] = r.frame_in
        if r.kind == "state":
            per[r.name] = abs(complex(r.entries.sum()) - 1)
        elif r.kind == "channel":
            per[r.name] = _maxabs(r.entries.sum(axis=0) - 1)
        else:
            groups.setdefault(r.group, []).append(r)
    for name, members in groups.items():
        if members[0].kind == "effect":
            per[name] = _maxabs(sum(m.entries for m in members) - 1)
        else:
            per[name] = _maxabs(sum(m.entries for m in members).sum(axis=0) - 1)
    for n, f in enumerate(frames_used.values()):
        per[f"unit_effect@frame{n}"] = _maxabs(represent_effect(np.eye(f.dim), f).entries - 1)
    worst = max(per.values(), default=0.0)
    return NormalizationReport(worst <= tol, worst, tol, per)


# --- certification ---------------------------------------------------------

@dataclass(frozen=True)
class SubstochasticityCheck:
    passed: bool
    margins: dict


@dataclass(frozen=True)
class CertificationReport:
    frames: tuple[KDFrame, ...]
    verdict: str
    max_abs_imag: float
    min_real_entry: float
    worst_offender: tuple[str, str, complex] | None
    substochasticity_check: SubstochasticityCheck
    tolerance: float


def _substochasticity(reps: list[RepresentedObject], tol: float, slack: float) -> SubstochasticityCheck:
    """Probability / response-function / substochastic checks for real entries.

    The upper bounds absorb the negativity allowance: an entry whose
    siblings may each dip to -tol can exceed its ideal bound by that much.
    """
    m = {
        "state_sum_deviation": 0.0,
        "state_excess": -math.inf,
        "effect_min": math.inf,
        "effect_excess": -math.inf,
        "channel_column_sum_deviation": 0.0,
        "channel_excess": -math.inf,
        "branch_column_sum_excess": -math.inf,
        "min_entry": math.inf,
        "max_abs_imag": 0.0,
    }
    ok = True
    for r in reps:
        re, im = r.entries.real, r.entries.imag
        if r.entries.size:
            m["min_entry"] = min(m["min_entry"], float(re.min()))
            m["max_abs_imag"] = max(m["max_abs_imag"], float(np.abs(im).max()))
        if r.kind == "state":
            dev = abs(float(re.sum()) - 1)
            excess = float(re.max()) - (1 + (re.size - 1) * tol)
            m["state_sum_deviation"] = max(m["state_sum_deviation"], dev)
            m["state_excess"] = max(m["state_excess"], excess)
            ok &= dev <= slack and excess <= slack
        elif r.kind == "effect":
            excess = float(re.max()) - (1 + (r.group_size - 1) * tol)
            m["effect_min"] = min(m["effect_min"], float(re.min()))
            m["effect_excess"] = max(m["effect_excess"], excess)
            ok &= excess <= slack
        elif r.kind == "channel":
            dev = _maxabs(re.sum(axis=0) - 1)
            m["channel_column_sum_deviation"] = max(m["channel_column_sum_deviation"], dev)
            ok &= dev <= slack
            excess = float(re.max()) - (1 + (re.shape[0] - 1) * tol)
            m["channel_excess"] = max(m["channel_excess"], excess)
            ok &= excess <= slack
        else:
            excess = float(re.sum(axis=0).max()) - (1 + (r.group_size - 1) * re.shape[0] * tol)
            m["branch_column_sum_excess"] = max(m["branch_column_sum_excess"], excess)
            ok &= excess <= slack
    if reps:
        ok &= m["min_entry"] >= -tol and m["max_abs_imag"] <= tol
    return SubstochasticityCheck(bool(ok), m)


def certify(fragment: Fragment, frames, tol: float | None = None,
            config: Config | None = None) -> CertificationReport:
    """Decide whether ``frames`` represent every member real and nonnegative.

    A NONNEGATIVE verdict makes the representation an ontological model of
    the fragment. A NEGATIVE verdict only says this frame choice fails;
    other frames, or models outside the KD family, may still succeed.

    Raises:
        ConsistencyError: the verdict is NONNEGATIVE yet states are not
            probability vectors, effects not response functions, or channels
            not substochastic. This cannot happen for valid input.
    """
    config = config or default_config()
    tol = config.nonneg_tol if tol is None else float(tol)
    fs = _frameset(fragment, frames, config)
    reps = represent_fragment(fragment, fs, config)
    max_imag, min_real = 0.0, math.inf
    worst, worst_bad = None, -math.inf
    for r in reps:
        flat = r.entries.reshape(-1)
        if not flat.size:
            continue
        max_imag = max(max_imag, float(np.abs(flat.imag).max()))
        min_real = min(min_real, float(flat.real.min()))
        bad = np.maximum(-flat.real, np.abs(flat.imag))
        k = int(np.argmax(bad))
        if bad[k] > worst_bad:
            worst_bad = float(bad[k])
            worst = (r.name, r.label(k), complex(flat[k]))
    verdict = NONNEGATIVE if (max_imag <= tol and min_real >= -tol) else NEGATIVE
    check = _substochasticity(reps, tol, slack=max(config.atol, 1e-9))
    if verdict == NONNEGATIVE and not check.passed:
        raise ConsistencyError(f"nonnegative verdict but consequence checks failed: {check.margins}")
    return CertificationReport(fs.frames, verdict, max_imag, min_real, worst, check, tol)


@dataclass(frozen=True)
class NegativityReport:
    total_negativity: float
    total_imaginarity: float
    per_object: dict


def negativity_measures(fragment: Fragment, frames, config: Config | None = None) -> NegativityReport:
    """Sum of max(0, -Re) and of |Im| over every represented entry."""
    reps = represent_fragment(fragment, frames, config)
    per = {}
    for r in reps:
        per[r.name] = (
            float(np.maximum(0.0, -r.entries.real).sum()),
            float(np.abs(r.entries.imag).sum()),
        )
    return NegativityReport(
        sum(v[0] for v in per.values()),
        sum(v[1] for v in per.values()),
        per,
    )
