"""Look for nonnegative KD frames for the bundled fragments over several seeds.

For each fragment and seed, runs ``search_nonnegative`` and reports the best
total negativity plus imaginarity. A zero means a certified witness frame
was found; a positive value is heuristic evidence only.

    python scripts/fragment_search.py --fragments classical,pauli,ypsilon --seeds 0,1,2
"""

import argparse
import time

from kdrep.fileio import load_fragment, read_document
from kdrep.search import SearchConfig, search_nonnegative


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--fragments", default="classical,qubit_zx,ypsilon,pauli")
    parser.add_argument("--seeds", default="0,1,2")
    parser.add_argument("--restarts", type=int, default=20)
    parser.add_argument("--max-iters", type=int, default=2000)
    args = parser.parse_args()

    print(f"{'fragment':<10} {'seed':>4} {'best':>14} {'median':>14} {'certified':>12} {'time':>7}")
    for name in args.fragments.split(","):
        fragment = load_fragment(read_document(f"bundled:{name}"))
        for seed in (int(s) for s in args.seeds.split(",")):
            t0 = time.perf_counter()
            res = search_nonnegative(
                fragment, SearchConfig(restarts=args.restarts, max_iters=args.max_iters, seed=seed)
            )
            median = sorted(res.trace)[len(res.trace) // 2]
            certified = res.diagnostics.get("certified", "-")
            print(f"{name:<10} {seed:>4} {res.best_objective:>14.6e} {median:>14.6e} {certified:>12} "
                  f"{time.perf_counter() - t0:>6.1f}s")


if __name__ == "__main__":
    main()
