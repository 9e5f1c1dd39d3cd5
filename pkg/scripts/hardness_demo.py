"""Small walk through the two lower-bound constructions.

Builds the hardest instance for (n, k, delta), answers a few random k-CNFs
through the worst-case engine, then decides Hamiltonian paths on a few
digraphs through the kSUM reduction.

    python3 scripts/hardness_demo.py --n 4 --k 2 --delta 1/2
"""

from __future__ import annotations

import argparse
import random

from oov.engines import make_engine
from oov.hardness import (
    Digraph,
    build_hardest_instance,
    encode_cnf_query,
    format_dimacs,
    hampath_oracle,
    hampath_via_ksum,
    random_cnf,
    sat_oracle,
)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--delta", default="1/2")
    ap.add_argument("--formulas", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)

    H = build_hardest_instance(args.n, args.k, args.delta)
    print(f"N={H.N} d={H.dim} w={H.w} theta={H.theta} blocks of {H.blockSize} variables")
    engine = make_engine("worst", H.instance, i=min(H.dim, 6))
    for _ in range(args.formulas):
        phi = random_cnf(args.n, args.k, rng.randint(1, 4 * args.n), rng)
        got = engine.query_bits(encode_cnf_query(H, phi))
        print(f"{len(phi.clauses):3d} clauses  ov={int(got)}  sat={int(sat_oracle(phi))}")
    print(format_dimacs(phi))

    for name, G in [("path", Digraph.path(6)), ("cycle", Digraph.cycle(6)), ("random", Digraph.random(6, 0.3, rng))]:
        rep = hampath_via_ksum(G, 3)
        print(f"{name:7s} queries={rep.queries} positive={rep.positive} ksum={int(rep.answer)} oracle={int(hampath_oracle(G))}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
