"""Desk-scale scan over the bundled fixture coverage.

Runs the scanner from a JSON config, writes the usual output directory, and
prints the best count per (genus, q) plus every maximal group.  With the
default config this covers every level pair whose relevant levels are
bundled (n0 * n_ns^2 <= 500).

    python3 scripts/desk_scan.py --config scripts/scan_desk.json --genus 7 --q 161051
"""
from __future__ import annotations

import argparse
import json
import logging
import time
from pathlib import Path

from mcpoint.newforms import default_store
from mcpoint.scanner import ScanConfig, read_rows, scan, write_tables


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=Path(__file__).with_name("scan_desk.json"))
    ap.add_argument("--output", help="override the config's output directory")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--genus", type=int, action="append", help="only print these genera")
    ap.add_argument("--q", type=int, action="append", help="only print these field sizes")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = ScanConfig.from_file(args.config)
    if args.output:
        cfg.output = args.output
    if args.threads:
        cfg.threads = args.threads
    store = default_store(cfg.fixtures)
    t0 = time.perf_counter()
    rows = scan(cfg, store)
    write_tables(Path(cfg.output), rows, store, cfg)
    print(f"{len(rows)} rows in {time.perf_counter() - t0:.1f}s -> {cfg.output}")

    keep = lambda g, q: (not args.genus or g in args.genus) and (not args.q or q in args.q)
    print("\nbest counts (genus, q, count, curve)")
    best = Path(cfg.output, "best.csv").read_text().splitlines()[1:]
    for line in best:
        g, q, count, curve = line.split(",", 3)
        if keep(int(g), int(q)):
            print(f"  {g:>3} {q:>9} {count:>9}  {curve.strip(chr(34))}")
    print("\nmaximal groups (genus, q, real Weil polynomial coefficients, curves)")
    for group in json.loads(Path(cfg.output, "maximal.json").read_text()):
        if keep(group["genus"], group["q"]):
            print(f"  {group['genus']:>3} {group['q']:>9} {group['real_weil_polynomial']}  {' '.join(group['curves'])}")
    assert rows == read_rows(Path(cfg.output, "rows.csv"))


if __name__ == "__main__":
    main()
