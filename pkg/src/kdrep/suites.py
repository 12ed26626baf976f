"""Randomised batteries of checks over Haar-random frames and processes.

Each battery takes a seed (or Generator), a trial count and the dimensions
to draw from, and returns ``CheckResult`` objects with the worst deviation
observed. The same batteries back ``kdrep verify --random`` and the
acceptance tests.
"""

from __future__ import annotations

import numpy as np

from .config import Config, default_config
from .frame import BasisPair, KDFrame, build_frame, frame_from_bases
from .qops import (
    DensityOperator,
    KrausChannel,
    TRACE_DECREASING,
    haar_unitary,
    random_pure_vector,
    sample,
)
from .represent import (
    KDPoint,
    predict,
    reconstruct_channel,
    reconstruct_effect,
    reconstruct_state,
    region_check,
    region_margins,
    represent_channel,
    represent_effect,
    represent_state,
)
from .verify import (
    CheckResult,
    Fragment,
    Instrument,
    verify_identity_channel,
    verify_normalization,
    verify_parallel,
    verify_sequential,
    verify_swap,
)

SUITES = ("functoriality", "normalization", "region", "faithfulness", "born")


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_frame(d: int, seed=None, config: Config | None = None) -> KDFrame:
    """Frame from two independent Haar bases, redrawn until admissible."""
    config = config or default_config()
    rng = _rng(seed)
    while True:
        pair = BasisPair.from_bases(haar_unitary(d, rng), haar_unitary(d, rng), config)
        if pair.min_overlap >= config.overlap_floor:
            return build_frame(pair, config)


def random_instrument(d: int, seed=None, branches: int = 2) -> tuple[KrausChannel, ...]:
    """Split the Kraus operators of a random channel into trace-decreasing branches."""
    rng = _rng(seed)
    ch = sample("random_channel", d, rng, rank=2 * branches)
    ops = ch.kraus_ops
    per = len(ops) // branches
    return tuple(
        KrausChannel(d, d, ops[b * per:(b + 1) * per], TRACE_DECREASING) for b in range(branches)
    )


def _worst(name: str, results: list[CheckResult], tol: float, **detail) -> CheckResult:
    dev = max((r.max_deviation for r in results), default=0.0)
    return CheckResult(name, all(r.passed for r in results), dev, tol, len(results), detail)


def functoriality_suite(seed, trials: int, dims=(2,), tol: float = 1e-9,
                        parallel_dims=None, config: Config | None = None) -> list[CheckResult]:
    """Identity, sequential, parallel and swap checks on random instances.

    Sequential pairs use independent random frames at the input, the
    intermediate system and the output, and random dimensions from ``dims``.
    """
    config = config or default_config()
    rng = _rng(seed)
    dims = tuple(dims)
    parallel_dims = tuple(parallel_dims or dims)
    pick = lambda ds: int(rng.choice(ds))  # noqa: E731

    ident, seq, par, swap = [], [], [], []
    for _ in range(trials):
        d = pick(dims)
        ident.append(verify_identity_channel(random_frame(d, rng, config), tol=tol))
    for _ in range(trials):
        da, db, dc = pick(dims), pick(dims), pick(dims)
        ch1 = sample("random_channel", (da, db), rng)
        ch2 = sample("random_channel", (db, dc), rng)
        frames = (random_frame(da, rng, config), random_frame(db, rng, config), random_frame(dc, rng, config))
        seq.append(verify_sequential(ch1, ch2, frames, tol))
    for _ in range(trials):
        da, db = pick(parallel_dims), pick(parallel_dims)
        ch1, ch2 = sample("random_channel", da, rng), sample("random_channel", db, rng)
        frames = tuple(random_frame(x, rng, config) for x in (da, db, da, db))
        par.append(verify_parallel(ch1, ch2, frames, tol))
    for _ in range(trials):
        da, db = pick(parallel_dims), pick(parallel_dims)
        swap.append(verify_swap(random_frame(da, rng, config), random_frame(db, rng, config), tol))
    return [
        _worst("identity", ident, tol),
        _worst("sequential", seq, tol),
        _worst("parallel", par, tol),
        _worst("swap", swap, tol),
    ]


def normalization_suite(seed, trials: int, dims=(2,), tol: float = 1e-12,
                        config: Config | None = None) -> list[CheckResult]:
    """Sum rules on random single-system fragments.

    Each trial draws a random frame plus a state, a channel, a POVM with 2
    or 3 outcomes and a two-branch instrument.
    """
    config = config or default_config()
    rng = _rng(seed)
    per_kind: dict[str, float] = {"state": 0.0, "channel": 0.0, "povm": 0.0, "instrument": 0.0, "unit": 0.0}
    for _ in range(trials):
        d = int(rng.choice(dims))
        frag = Fragment.build(
            d,
            states=[sample("random_density", d, rng)],
            measurements=[sample("random_povm", d, rng, outcomes=int(rng.integers(2, 4)))],
            channels=[sample("random_channel", d, rng)],
            instruments=[Instrument(random_instrument(d, rng), ("yes", "no"))],
            config=config,
        )
        rep = verify_normalization(frag, random_frame(d, rng, config), tol, config)
        for key, dev in rep.per_object.items():
            kind = {"state0": "state", "channel0": "channel", "povm0": "povm",
                    "instrument0": "instrument"}.get(key, "unit")
            per_kind[kind] = max(per_kind[kind], dev)
    return [
        CheckResult(f"normalization_{k}", v <= tol, v, tol, trials) for k, v in per_kind.items()
    ]


def region_suite(seed, trials: int, dims=(2, 3, 4), tol: float = 1e-9,
                 config: Config | None = None) -> list[CheckResult]:
    """Region inequality and |mu| <= 1 over random (pure state, frame) pairs."""
    config = config or default_config()
    rng = _rng(seed)
    min_margin, max_mod = np.inf, 0.0
    min_re, max_im = np.inf, -np.inf
    for _ in range(trials):
        d = int(rng.choice(dims))
        f = random_frame(d, rng, config)
        mu = represent_state(DensityOperator.pure(random_pure_vector(d, rng), config), f).entries
        min_margin = min(min_margin, float(region_margins(mu).min()))
        max_mod = max(max_mod, float(np.abs(mu).max()))
        min_re = min(min_re, float(mu.real.min()))
        max_im = max(max_im, float(mu.imag.max()))
    boundary = max(
        abs(region_check(KDPoint(1 / 8, np.pi))),
        abs(region_check(KDPoint(2 ** -1.5, np.pi / 4))),
    )
    return [
        CheckResult("region_margin", min_margin >= -tol, max(0.0, -min_margin), tol, trials,
                    {"min_margin": min_margin, "min_real": min_re, "max_imag": max_im}),
        CheckResult("boundedness", max_mod <= 1 + 1e-12, max(0.0, max_mod - 1), 1e-12, trials,
                    {"max_modulus": max_mod}),
        CheckResult("region_boundary", boundary <= 1e-12, boundary, 1e-12, 2),
    ]


def faithfulness_suite(seed, n_states: int, n_povms: int, n_channels: int, dims=(2, 3),
                       tol: float = 1e-9, config: Config | None = None) -> list[CheckResult]:
    """Frobenius round-trip errors for states, effects and channels."""
    config = config or default_config()
    rng = _rng(seed)
    max_mod = 0.0
    errs = {"states": 0.0, "effects": 0.0, "channels": 0.0}
    for _ in range(n_states):
        d = int(rng.choice(dims))
        f = random_frame(d, rng, config)
        rho = sample("random_pure", d, rng) if rng.random() < 0.5 else sample("random_density", d, rng)
        mu = represent_state(rho, f)
        max_mod = max(max_mod, float(np.abs(mu.entries).max()))
        errs["states"] = max(errs["states"], float(np.linalg.norm(reconstruct_state(mu) - rho.matrix)))
    for _ in range(n_povms):
        d = int(rng.choice(dims))
        f = random_frame(d, rng, config)
        for e in sample("random_povm", d, rng, outcomes=int(rng.integers(2, 4))).effects:
            errs["effects"] = max(errs["effects"], float(np.linalg.norm(reconstruct_effect(represent_effect(e, f)) - e)))
    for _ in range(n_channels):
        da, db = int(rng.choice(dims)), int(rng.choice(dims))
        ch = sample("random_channel", (da, db), rng)
        rec = reconstruct_channel(represent_channel(ch, random_frame(da, rng, config), random_frame(db, rng, config)))
        # agreement on a spanning set (matrix units) and on a random state
        probes = [np.outer(np.eye(da)[a], np.eye(da)[b]) for a in range(da) for b in range(da)]
        probes.append(sample("random_density", da, rng).matrix)
        for x in probes:
            errs["channels"] = max(errs["channels"], float(np.linalg.norm(rec(x) - ch(x))))
    counts = {"states": n_states, "effects": n_povms, "channels": n_channels}
    out = [CheckResult(f"roundtrip_{k}", v <= tol, v, tol, counts[k]) for k, v in errs.items()]
    out.append(CheckResult("boundedness", max_mod <= 1 + 1e-12, max(0.0, max_mod - 1), 1e-12, n_states,
                           {"max_modulus": max_mod}))
    return out


def born_suite(seed, trials: int, dims=(2, 3), tol: float = 1e-10,
               config: Config | None = None) -> list[CheckResult]:
    """predict(xi, [Gamma], mu) against Tr[E E(rho)] from density matrices.

    Half the trials chain two channels through an intermediate frame.
    """
    config = config or default_config()
    rng = _rng(seed)
    worst, worst_imag = 0.0, 0.0
    for n in range(trials):
        da, db = int(rng.choice(dims)), int(rng.choice(dims))
        rho = sample("random_density", da, rng)
        ch = sample("random_channel", (da, db), rng)
        e = sample("random_povm", db, rng).effects[0]
        fa, fb = random_frame(da, rng, config), random_frame(db, rng, config)
        if n % 2:
            ch2 = sample("random_channel", db, rng)
            fc = random_frame(db, rng, config)
            gammas = [represent_channel(ch, fa, fb), represent_channel(ch2, fb, fc)]
            oracle = np.trace(e @ ch2(ch(rho.matrix)))
            xi = represent_effect(e, fc)
        else:
            gammas = [represent_channel(ch, fa, fb)]
            oracle = np.trace(e @ ch(rho.matrix))
            xi = represent_effect(e, fb)
        p = predict(xi, gammas, represent_state(rho, fa))
        worst = max(worst, abs(p - oracle))
        worst_imag = max(worst_imag, abs(p.imag))
    return [
        CheckResult("born_rule", worst <= tol, float(worst), tol, trials),
        CheckResult("born_rule_imag", worst_imag <= tol, float(worst_imag), tol, trials),
    ]
