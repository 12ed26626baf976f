"""Command-line interface: ``kdrep {represent,verify,certify,search}``.

Exit codes: 0 success / NONNEGATIVE, 1 a verification check failed,
2 parse error, 3 validation error, 4 inadmissible frame, 10 NEGATIVE.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import sys
from itertools import combinations

import numpy as np

from . import __version__
from .config import default_config
from .errors import KDError, OrthogonalPairError, ValidationError
from .fileio import (
    ParseError,
    bundled_names,
    dump_json,
    entries_csv,
    load_fragment,
    load_frames,
    pair_to_json,
    read_document,
    rows_csv,
    select_frames,
    write_outputs,
)
from .represent import region_margins
from .search import SearchConfig, search_extremal, search_nonnegative
from .suites import (
    SUITES,
    born_suite,
    faithfulness_suite,
    functoriality_suite,
    normalization_suite,
    region_suite,
)
from .verify import (
    NONNEGATIVE,
    CheckResult,
    FrameSet,
    certify,
    negativity_measures,
    represent_fragment,
    verify_identity_channel,
    verify_normalization,
    verify_parallel,
    verify_sequential,
    verify_swap,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_FRAME = 4
EXIT_NEGATIVE = 10

SUITE_TOLERANCES = {
    "functoriality": 1e-9,
    "normalization": 1e-12,
    "region": 1e-9,
    "faithfulness": 1e-9,
    "born": 1e-10,
}


def _meta(args, config, **extra) -> dict:
    return {
        "command": args.command,
        "argv": list(args.argv),
        "seed": getattr(args, "seed", None),
        "tolerances": dataclasses.asdict(config),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
        **extra,
    }


def _emit(args, files: dict[str, str], summary: dict) -> None:
    if args.out:
        write_outputs(args.out, {**files, "report.json": dump_json(summary)})
    else:
        sys.stdout.write(dump_json(summary))


def _load(args, config):
    doc = read_document(args.input)
    fragment = load_fragment(doc, config)
    extra = []
    for path in getattr(args, "frames", None) or []:
        extra += load_frames(read_document(path), config)
    frames = select_frames(doc, getattr(args, "frame", None) or (), extra, config)
    return doc, fragment, frames


def _frames_summary(fragment, frames) -> list[dict]:
    return [
        {**pair_to_json(f"frame_{name}", name, f.basis_pair), "min_overlap": f.min_overlap}
        for name, f in zip(fragment.system_names, frames)
    ]


# --- represent -------------------------------------------------------------

def cmd_represent(args) -> int:
    config = default_config()
    _, fragment, frames = _load(args, config)
    reps = represent_fragment(fragment, frames, config)
    files = {
        "states.csv": entries_csv(reps, ("state",)),
        "effects.csv": entries_csv(reps, ("effect",)),
        "channels.csv": entries_csv(reps, ("channel", "branch")),
    }
    summary = {
        "meta": _meta(args, config, input=args.input),
        "frames": _frames_summary(fragment, frames),
        "objects": [
            {"name": r.name, "kind": r.kind, "shape": list(r.entries.shape),
             "sum": complex(r.entries.sum()) if r.entries.ndim == 1 else None,
             "column_sums_max_dev": float(np.max(np.abs(r.entries.sum(axis=0) - 1))) if r.kind == "channel" else None}
            for r in reps
        ],
    }
    if not args.out:
        sys.stdout.write(files["states.csv"])
        return EXIT_OK
    _emit(args, files, summary)
    return EXIT_OK


# --- verify ----------------------------------------------------------------

def _random_checks(args, config) -> list[tuple[str, CheckResult]]:
    dims = tuple(args.dims)
    n = args.trials
    rng = np.random.default_rng(args.seed)
    out = []
    for suite in _suites(args.suite):
        tol = SUITE_TOLERANCES[suite]
        if suite == "functoriality":
            res = functoriality_suite(rng, n, dims, tol, config=config)
        elif suite == "normalization":
            res = normalization_suite(rng, n, dims, tol, config=config)
        elif suite == "region":
            res = region_suite(rng, n, dims, tol, config=config)
        elif suite == "faithfulness":
            res = faithfulness_suite(rng, n, n, n, dims, tol, config=config)
        else:
            res = born_suite(rng, n, dims, tol, config=config)
        out += [(suite, r) for r in res]
    return out


def _file_checks(args, config) -> list[tuple[str, CheckResult]]:
    _, fragment, frames = _load(args, config)
    fs = FrameSet(frames, config)
    out = []
    suites = _suites(args.suite)
    if "functoriality" in suites:
        tol = SUITE_TOLERANCES["functoriality"]
        for s, f in enumerate(frames):
            r = verify_identity_channel(f, tol=tol)
            out.append(("functoriality", dataclasses.replace(r, name=f"identity@{fragment.system_names[s]}")))
        for s, t in combinations(range(len(frames)), 2):
            r = verify_swap(frames[s], frames[t], tol)
            names = fragment.system_names
            out.append(("functoriality", dataclasses.replace(r, name=f"swap@{names[s]},{names[t]}")))
        chans = fragment.channels
        for m1 in chans:
            for m2 in chans:
                if m1.systems_out == m2.systems:
                    triple = (fs.for_systems(m1.systems), fs.for_systems(m1.systems_out), fs.for_systems(m2.systems_out))
                    r = verify_sequential(m1.value, m2.value, triple, tol)
                    out.append(("functoriality", dataclasses.replace(r, name=f"sequential:{m2.name}o{m1.name}")))
        for m1, m2 in combinations(chans, 2):
            quad = (fs.for_systems(m1.systems), fs.for_systems(m2.systems),
                    fs.for_systems(m1.systems_out), fs.for_systems(m2.systems_out))
            r = verify_parallel(m1.value, m2.value, quad, tol)
            out.append(("functoriality", dataclasses.replace(r, name=f"parallel:{m1.name}x{m2.name}")))
    if "normalization" in suites:
        tol = SUITE_TOLERANCES["normalization"]
        rep = verify_normalization(fragment, fs, tol, config)
        for name, dev in rep.per_object.items():
            out.append(("normalization", CheckResult(f"normalization:{name}", dev <= tol, dev, tol)))
    if "region" in suites:
        tol = SUITE_TOLERANCES["region"]
        reps = [r for r in represent_fragment(fragment, fs, config) if r.kind == "state"]
        for r in reps:
            margin = float(region_margins(r.entries).min())
            modulus = float(np.abs(r.entries).max())
            out.append(("region", CheckResult(f"region:{r.name}", margin >= -tol, max(0.0, -margin), tol,
                                              detail={"min_margin": margin})))
            out.append(("region", CheckResult(f"boundedness:{r.name}", modulus <= 1 + 1e-12,
                                              max(0.0, modulus - 1), 1e-12)))
    return out


def _suites(choice: str) -> tuple[str, ...]:
    return SUITES if choice == "all" else (choice,)


def cmd_verify(args) -> int:
    config = default_config()
    if args.random == bool(args.input):
        raise ParseError("give exactly one of INPUT or --random")
    checks = _random_checks(args, config) if args.random else _file_checks(args, config)
    rows = [[suite, c.name, c.trials, float(c.max_deviation), float(c.tolerance), "pass" if c.passed else "fail"]
            for suite, c in checks]
    passed = all(c.passed for _, c in checks)
    summary = {
        "meta": _meta(args, config, input=args.input, suite=args.suite, trials=args.trials, dims=args.dims),
        "passed": passed,
        "checks": [{"suite": s, **dataclasses.asdict(c)} for s, c in checks],
    }
    for suite, c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {suite:<14} {c.name:<28} max_dev={c.max_deviation:.3e} "
              f"tol={c.tolerance:.0e}" + (f" {c.detail}" if c.detail else ""), file=sys.stderr)
    files = {"checks.csv": rows_csv(["suite", "check", "trials", "max_deviation", "tolerance", "result"], rows)}
    if args.out:
        write_outputs(args.out, {**files, "report.json": dump_json(summary)})
    else:
        sys.stdout.write(files["checks.csv"])
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# --- certify ---------------------------------------------------------------

def cmd_certify(args) -> int:
    config = default_config()
    _, fragment, frames = _load(args, config)
    rep = certify(fragment, frames, tol=args.tol, config=config)
    neg = negativity_measures(fragment, frames, config)
    reps = represent_fragment(fragment, frames, config)
    summary = {
        "meta": _meta(args, config, input=args.input),
        "frames": _frames_summary(fragment, frames),
        "certification": {
            "verdict": rep.verdict,
            "tolerance": rep.tolerance,
            "max_abs_imag": rep.max_abs_imag,
            "min_real_entry": rep.min_real_entry,
            "worst_offender": None if rep.worst_offender is None else {
                "object": rep.worst_offender[0], "index": rep.worst_offender[1], "value": rep.worst_offender[2]},
            "substochasticity_check": dataclasses.asdict(rep.substochasticity_check),
            "scope": "verdict concerns the chosen frames only; NEGATIVE does not establish contextuality",
        },
        "negativity": dataclasses.asdict(neg),
    }
    files = {
        "states.csv": entries_csv(reps, ("state",)),
        "effects.csv": entries_csv(reps, ("effect",)),
        "channels.csv": entries_csv(reps, ("channel", "branch")),
    }
    print(f"{rep.verdict} max_abs_imag={rep.max_abs_imag:.12g} min_real_entry={rep.min_real_entry:.12g}",
          file=sys.stderr)
    if args.out:
        write_outputs(args.out, {**files, "report.json": dump_json(summary)})
    else:
        sys.stdout.write(dump_json(summary))
    return EXIT_OK if rep.verdict == NONNEGATIVE else EXIT_NEGATIVE


# --- search ----------------------------------------------------------------

def cmd_search(args) -> int:
    config = default_config()
    if args.mode == "nonneg":
        if not args.input:
            raise ParseError("--mode nonneg needs an INPUT fragment")
        doc = read_document(args.input)
        fragment = load_fragment(doc, config)
        cfg = SearchConfig(restarts=args.restarts, max_iters=args.max_iters or 2000, seed=args.seed,
                           optimizer=args.optimizer)
        res = search_nonnegative(fragment, cfg, config)
        witness = None
        if res.best_frame is not None:
            witness = [pair_to_json(f"witness_{name}", name, f.basis_pair)
                       for name, f in zip(fragment.system_names, res.best_frame)]
        summary = {
            "meta": _meta(args, config, input=args.input, mode=args.mode, restarts=args.restarts),
            "best_objective": res.best_objective,
            "found_nonnegative": res.best_objective <= config.nonneg_tol,
            "certified": res.diagnostics.get("certified"),
            "evaluations": res.evaluations,
            "trace": res.trace,
            "best_params": res.best_params,
            "witness_frames": witness,
            "note": "heuristic search; failure to reach zero does not prove that no nonnegative frame exists",
        }
        print(f"best_objective = {res.best_objective:.12g}")
        files = {"trace.csv": rows_csv(["restart", "objective"], [[r, float(v)] for r, v in enumerate(res.trace)])}
        if witness is not None:
            files["frames.json"] = dump_json({"schema_version": 1, "frames": witness})
        if args.out:
            write_outputs(args.out, {**files, "result.json": dump_json(summary)})
        return EXIT_OK

    mode = "min_real" if args.mode == "min-real" else "max_imag"
    cfg = SearchConfig(restarts=args.restarts, max_iters=args.max_iters or 4000, seed=args.seed,
                       objective="min_real_entry" if mode == "min_real" else "max_imag_entry",
                       optimizer=args.optimizer)
    res = search_extremal(mode, cfg, args.dim, config)
    bases = None
    if res.best_frame is not None:
        bases = pair_to_json("extremal", "A", res.best_frame[0].basis_pair)
    summary = {
        "meta": _meta(args, config, mode=args.mode, restarts=args.restarts, dim=args.dim),
        "best_value": res.best_objective,
        "best_entry": res.diagnostics["best_value"],
        "best_index": res.diagnostics["best_index"],
        "state": res.best_state,
        "bases": bases,
        "diagnostics": {k: v for k, v in res.diagnostics.items() if k not in ("best_value", "best_index")},
        "evaluations": res.evaluations,
        "trace": res.trace,
    }
    print(f"best_value = {res.best_objective:.12g}")
    print(f"state = {np.array2string(res.best_state, precision=6)}")
    if res.best_frame is not None:
        pair = res.best_frame[0].basis_pair
        print(f"basis_a =\n{np.array2string(pair.basis_a, precision=6)}")
        print(f"basis_a_prime =\n{np.array2string(pair.basis_a_prime, precision=6)}")
    files = {"trace.csv": rows_csv(["restart", "value"], [[r, float(v)] for r, v in enumerate(res.trace)])}
    if args.out:
        write_outputs(args.out, {**files, "result.json": dump_json(summary)})
    return EXIT_OK


# --- entry point -----------------------------------------------------------

def _dims(text: str) -> list[int]:
    try:
        dims = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None
    if not dims or any(d < 2 for d in dims):
        raise argparse.ArgumentTypeError("dimensions must be integers >= 2")
    return dims


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kdrep", description="Kirkwood-Dirac representations of quantum processes.")
    p.add_argument("--version", action="version", version=f"kdrep {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp, required=True):
        help_ = f"fragment JSON path or bundled:NAME ({', '.join(bundled_names())})"
        sp.add_argument("input", nargs=None if required else "?", help=help_)

    def add_frames(sp):
        sp.add_argument("--frame", action="append", default=[], help="use the named frame (repeatable)")
        sp.add_argument("--frames", action="append", default=[], help="extra JSON file with a 'frames' list")

    sp = sub.add_parser("represent", help="emit mu / xi / Gamma tables")
    add_input(sp)
    add_frames(sp)
    sp.add_argument("--out", help="output directory")
    sp.set_defaults(func=cmd_represent)

    sp = sub.add_parser("verify", help="run structural verification suites")
    add_input(sp, required=False)
    add_frames(sp)
    sp.add_argument("--random", action="store_true", help="randomised instances instead of a file")
    sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--dims", type=_dims, default=[2], help="comma-separated dimensions, e.g. 2,3")
    sp.add_argument("--out", help="output directory")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("certify", help="nonnegativity verdict for a fragment")
    add_input(sp)
    add_frames(sp)
    sp.add_argument("--tol", type=float, default=None, help="nonnegativity tolerance (default 1e-9)")
    sp.add_argument("--out", help="output directory")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("search", help="optimise over basis pairs")
    add_input(sp, required=False)
    sp.add_argument("--mode", choices=("nonneg", "min-real", "max-imag"), required=True)
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-iters", type=int, default=None)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--optimizer", choices=("nelder_mead", "random_search"), default="nelder_mead")
    sp.add_argument("--out", help="output directory")
    sp.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    args.argv = argv
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OrthogonalPairError as exc:
        print(f"inadmissible frame: {exc}", file=sys.stderr)
        return EXIT_FRAME
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except KDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
