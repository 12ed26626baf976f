"""Search for the most negative real part and largest imaginary part of KD values.

Runs ``search_extremal`` in both modes for each requested dimension and
prints the best value per mode next to the extremes seen during the run.
At d = 2 the values should approach -1/8 and 1/4 without passing them.

    python scripts/extremal_search.py --dims 2,3 --restarts 50 --out results/extremal.json
"""

import argparse
import json
import time
from pathlib import Path

from kdrep.fileio import to_jsonable
from kdrep.search import SearchConfig, search_extremal


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", default="2", help="comma-separated dimensions")
    parser.add_argument("--restarts", type=int, default=50)
    parser.add_argument("--max-iters", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--out", type=Path, help="write a JSON summary here")
    args = parser.parse_args()

    rows = []
    for d in (int(x) for x in args.dims.split(",")):
        for mode, objective in (("min_real", "min_real_entry"), ("max_imag", "max_imag_entry")):
            cfg = SearchConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed,
                               objective=objective)
            t0 = time.perf_counter()
            res = search_extremal(mode, cfg, dim=d)
            rows.append({
                "dim": d,
                "mode": mode,
                "best": res.best_objective,
                "seconds": time.perf_counter() - t0,
                "evaluations": res.evaluations,
                "state": res.best_state,
                **{k: v for k, v in res.diagnostics.items() if k.endswith("_seen") or k == "min_region_margin"},
            })
            r = rows[-1]
            print(f"d={d} {mode:<9} best={r['best']:+.12f}  min_re_seen={r['min_real_seen']:+.3e}  "
                  f"max_im_seen={r['max_imag_seen']:+.3e}  min_margin={r['min_region_margin']:+.1e}  "
                  f"({r['seconds']:.1f} s)")

    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(to_jsonable(rows), indent=2) + "\n")


if __name__ == "__main__":
    main()
