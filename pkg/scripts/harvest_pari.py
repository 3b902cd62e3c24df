"""Harvest weight-2 trivial-character newform data with PARI/GP.

Offline stand-in for the LMFDB fetcher: writes one JSON file per level into
a cache directory, in the same layout ``mcpoint fetch`` produces, so the two
sources are interchangeable.  Requires ``cypari2`` (not a package dependency).

    python scripts/harvest_pari.py --levels 1-500 --cache data_cache/
"""
from __future__ import annotations

import argparse
import json
import os
from pathlib import Path

import cypari2

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)
N_TRACES = 150

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9, silent=True)


def _parse_levels(text: str) -> list[int]:
    levels: set[int] = set()
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            levels.update(range(int(lo), int(hi) + 1))
        else:
            levels.add(int(part))
    return sorted(levels)


def _al_sign(values) -> int:
    signs = {int(pari.round(pari.real(x))) for x in values}
    if len(signs) != 1 or signs.pop() not in (1, -1):
        raise ValueError(f"non-constant Atkin-Lehner eigenvalues {values}")
    return int(pari.round(pari.real(values[0])))


def _orbit_letter(i: int) -> str:
    # LMFDB style: a..z, ba, bb, ...
    digits = []
    while True:
        digits.append(chr(ord("a") + i % 26))
        i //= 26
        if i == 0:
            break
    return "".join(reversed(digits))


def level_records(level: int) -> list[dict]:
    mf = pari.mfinit([level, 2, 1], 0)
    if pari.mfdim(mf) == 0:
        return []
    fields = pari.mffields(mf)
    forms = pari.mfeigenbasis(mf)
    factors = [int(p) for p in pari.factor(level)[0]] if level > 1 else []
    prime_powers = [p ** int(pari.valuation(level, p)) for p in factors]
    al_tables = {q: pari.mfatkineigenvalues(mf, q) for q in prime_powers}
    raw = []
    for i, (form, field) in enumerate(zip(forms, fields)):
        nonrational = pari.poldegree(field) > 0
        dim = int(pari.poldegree(field)) if nonrational else 1
        coefs = pari.mfcoefs(form, N_TRACES)

        def elt(a):
            return pari.Mod(pari.lift(a), field) if nonrational else a

        traces = [int(pari.trace(elt(coefs[n]))) if nonrational else int(coefs[n])
                  for n in range(1, N_TRACES + 1)]
        charpolys = {}
        for p in PRIMES:
            if level % p == 0:
                continue
            cp = pari.charpoly(elt(coefs[p]))
            charpolys[str(p)] = [int(c) for c in pari.Vecrev(cp)]
        al = [[q, _al_sign(al_tables[q][i])] for q in prime_powers]
        raw.append((dim, traces, al, charpolys))
    raw.sort(key=lambda t: (t[0], t[1]))
    records = []
    for j, (dim, _traces, al, charpolys) in enumerate(raw):
        records.append({
            "label": f"{level}.2.a.{_orbit_letter(j)}",
            "level": level,
            "dim": dim,
            "al_signs": al,
            "al_extended": [],
            "hecke_charpolys": dict(sorted(charpolys.items(), key=lambda kv: int(kv[0]))),
        })
    return records


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", required=True)
    ap.add_argument("--cache", type=Path, required=True)
    args = ap.parse_args()
    args.cache.mkdir(parents=True, exist_ok=True)
    for level in _parse_levels(args.levels):
        path = args.cache / f"level_{level:05d}.json"
        if path.exists():
            continue
        doc = {"schema_version": 1, "level": level, "source": "pari",
               "primes": [p for p in PRIMES if level % p],
               "records": level_records(level)}
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True) + "\n")
        os.replace(tmp, path)
        print(level, len(doc["records"]), flush=True)


if __name__ == "__main__":
    main()
