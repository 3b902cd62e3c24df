"""Traces of T_p * W_Q on the full cusp space S_2(Gamma_0(N)), via PARI/GP.

These give genera and point counts of X_0(N)/K directly, without splitting
the space into newform classes, and serve as an independent check on the
multiplicity route.  Requires ``cypari2``.

    python scripts/pari_al_traces.py --max-level 200 --out tests/data/al_traces.json
"""
from __future__ import annotations

import argparse
import json
from pathlib import Path

import cypari2

PRIMES = (2, 3, 5, 7, 11, 13)

pari = cypari2.Pari()
pari.allocatemem(10**9, silent=True)


def exact_divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0 and pari.gcd(d, n // d) == 1]


def level_traces(n: int) -> dict:
    mf = pari.mfinit([n, 2], 1)
    dim = int(pari.mfdim(mf))
    out = {"dim": dim, "traces": {}}
    if dim == 0:
        return out
    heckes = {p: pari.mfheckemat(mf, p) for p in PRIMES if n % p}
    for Q in exact_divisors(n):
        W = pari.matid(dim) if Q == 1 else pari.mfatkininit(mf, Q)[1]
        row = {"1": int(pari.trace(W))}
        for p, T in heckes.items():
            row[str(p)] = int(pari.trace(T * W))
        out["traces"][str(Q)] = row
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-level", type=int, default=200)
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()
    doc = {str(n): level_traces(n) for n in range(1, args.max_level + 1)}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(doc, separators=(",", ":"), sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
