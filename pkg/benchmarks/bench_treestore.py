"""Time the TreeRePair replacement kernel: pure Python vs compiled.

    python3 benchmarks/bench_treestore.py --nodes 20000 80000 --repeat 3

Both kernels receive the same random forest of proof-like terms (binary
``D``, unary ``G``, a few axiom leaves) and must return identical rules.
"""

import argparse
import random
import statistics
import time

from proofgram.compress import _pytreestore

try:
    from proofgram.compress import _ctreestore
except ImportError:
    _ctreestore = None


def forest(n_nodes: int, seed: int):
    """Random proof-like trees totalling about ``n_nodes`` tree nodes.

    Subtrees are frequently reused, as in expanded proofs, so digrams
    repeat.  Trees are (sym, kids) tuples.
    """
    rng = random.Random(seed)
    pool = []

    def gen(depth):
        if pool and rng.random() < 0.3:
            return rng.choice(pool)
        if depth == 0 or rng.random() < 0.15:
            return (rng.randrange(4), ())             # axiom leaf
        if rng.random() < 0.75:
            t = (4, (gen(depth - 1), gen(depth - 1)))  # D
        else:
            t = (5, (gen(depth - 1),))                 # G
        if rng.random() < 0.1:
            pool.append(t)
        return t

    trees, total = [], 0
    while total < n_nodes:
        t = gen(12)
        trees.append(t)
        total += tree_nodes([t])
    return trees


def load(mod, trees):
    s = mod.TreeStore()
    for a in (0, 0, 0, 0, 2, 1):
        s.add_symbol(a)

    def build(t):
        # iterative unsharing into store nodes
        out = []
        stack = [(t, False)]
        while stack:
            u, done = stack.pop()
            if done:
                k = len(u[1])
                kids = out[len(out) - k:] if k else []
                del out[len(out) - k:]
                out.append(s.add(u[0], kids))
            else:
                stack.append((u, True))
                stack.extend((c, False) for c in reversed(u[1]))
        return out[0]

    for t in trees:
        build(t)
    return s


def tree_nodes(trees):
    memo = {}

    def count(t):
        if id(t) not in memo:
            memo[id(t)] = 1 + sum(count(c) for c in t[1])
        return memo[id(t)]
    return sum(count(t) for t in trees)


def bench(mod, trees, repeat):
    times, rules = [], None
    for _ in range(repeat):
        s = load(mod, trees)
        t0 = time.perf_counter()
        rules = s.run(2, 0)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), rules


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, nargs="+", default=[5000, 20000, 80000],
                    help="approximate tree node counts of the generated inputs")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args()
    print(f"{'target':>8} {'tree':>10} {'rules':>7} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n in a.nodes:
        trees = forest(n, a.seed)
        size = tree_nodes(trees)
        tp, rp = bench(_pytreestore, trees, a.repeat)
        if _ctreestore is None:
            print(f"{n:>8} {size:>10} {len(rp):>7} {tp:>10.3f} {'n/a':>11} {'n/a':>8}")
            continue
        tc, rc = bench(_ctreestore, trees, a.repeat)
        if rc != rp:
            raise SystemExit("kernels disagree")
        print(f"{n:>8} {size:>10} {len(rp):>7} {tp:>10.3f} {tc:>11.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
