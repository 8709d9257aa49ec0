"""Time the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import random
import timeit

from craftplan import _kernels
from craftplan.textworld import load_spec


def workloads():
    spec = load_spec()
    truth = spec.truth_graph()
    incoming = truth._incoming
    outgoing = truth._outgoing
    goals = spec.goal_items
    tools = spec.tool_items
    names = sorted(spec.items)
    rng = random.Random(0)
    pairs = [(rng.choice(names), rng.choice(names)) for _ in range(500)]
    inv = {"planks": 3, "stick": 1}
    return {
        "aggregate (67 goals)": lambda m: [m.aggregate(incoming, g, inv, tools) for g in goals],
        "reachable (all items)": lambda m: [m.reachable(outgoing, v) for v in names],
        "trigram_cosine (500 pairs)": lambda m: [m.trigram_cosine(a, b) for a, b in pairs],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    impls = _kernels.backends()
    if "cython" not in impls:
        print("compiled kernels not built; only the fallback is timed")
    print(f"{'kernel':28s}" + "".join(f"{name:>12s}" for name in impls) + "     speedup")
    for label, work in workloads().items():
        times = {}
        for name, mod in impls.items():
            best = min(timeit.repeat(lambda: work(mod), number=args.repeat, repeat=3))
            times[name] = best / args.repeat * 1e3
        row = f"{label:28s}" + "".join(f"{times[n]:10.3f}ms" for n in impls)
        if "cython" in times:
            row += f"  {times['python'] / times['cython']:9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
