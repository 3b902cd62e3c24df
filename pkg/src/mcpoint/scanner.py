"""Scan quotient curves over a level range and tabulate point counts.

The unit of work is a level pair ``(n0, n_ns)``: all of its Atkin-Lehner
subgroups share the same newforms, so the ``S_k`` cache is per pair.
Completed pairs are appended to a line-delimited JSON journal (with a
checksum per line); a rerun skips every pair already journalled.  The final
CSV is sorted on ``(n0, n_ns, subgroup, p, k)`` so it does not depend on the
number of workers.

Output directory layout::

    rows.csv        curve,genus,p,k,count,maximal
    skips.json      pairs whose relevant levels are not covered
    journal.jsonl   progress journal (rewritten in sorted order on completion)
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import gcd
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .curves import BorelCartanLevel, QuotientCurve, enumerate_subgroups, is_prime
from .multiplicity import decompose
from .newforms import NewformStore, default_store
from .points import count_points, real_weil_poly_of_curve

log = logging.getLogger(__name__)

CSV_HEADER = ["curve", "genus", "p", "k", "count", "maximal"]


@dataclass
class ScanConfig:
    max_n: int = 10000
    primes: list[int] = field(default_factory=lambda: [2, 3, 5, 7, 11, 13, 17, 19])
    max_k: dict[int, int] = field(default_factory=lambda: {2: 7})
    default_max_k: int = 5
    genus_range: tuple[int, int] = (0, 50)
    fixtures: str | None = None
    output: str = "scan_out"
    threads: int = 1
    pairs: list[tuple[int, int]] | None = None
    optimal_counts: list[tuple[int, int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.primes = sorted(int(p) for p in self.primes)
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise ValueError(f"not prime: {bad}")
        self.max_k = {int(p): int(k) for p, k in self.max_k.items()}
        self.genus_range = tuple(self.genus_range)  # type: ignore[assignment]
        if self.pairs is not None:
            self.pairs = sorted(tuple(pair) for pair in self.pairs)  # type: ignore[misc]
        self.optimal_counts = sorted(tuple(t) for t in self.optimal_counts)  # type: ignore[misc]
        if self.threads < 1:
            raise ValueError("threads must be positive")

    def optimal(self) -> dict[tuple[int, int], int]:
        """``(genus, q) -> largest possible count``, as supplied by the user."""
        return {(g, q): n for g, q, n in self.optimal_counts}

    def degrees(self, p: int) -> range:
        return range(1, self.max_k.get(p, self.default_max_k) + 1)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> ScanConfig:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if "max_k" in doc:
            doc["max_k"] = {int(p): k for p, k in doc["max_k"].items()}
        return cls(**doc)


@dataclass(frozen=True)
class ScanRow:
    curve: str
    genus: int
    p: int
    k: int
    count: int
    maximal: bool

    @property
    def q(self) -> int:
        return self.p**self.k

    def csv_fields(self) -> list[str]:
        return [self.curve, str(self.genus), str(self.p), str(self.k), str(self.count),
                "true" if self.maximal else "false"]

    @classmethod
    def from_fields(cls, fields: list[str]) -> ScanRow:
        curve, g, p, k, count, maximal = fields
        return cls(curve, int(g), int(p), int(k), int(count), maximal == "true")


def level_pairs(max_n: int) -> Iterator[tuple[int, int]]:
    """Coprime ``(n0, n_ns)`` with ``n0 * n_ns^2 <= max_n``, in lexicographic order."""
    for n0 in range(1, max_n + 1):
        n_ns = 1
        while n0 * n_ns * n_ns <= max_n:
            if gcd(n0, n_ns) == 1:
                yield n0, n_ns
            n_ns += 1


def scan_pair(pair: tuple[int, int], cfg: ScanConfig, store: NewformStore) -> dict:
    """Rows (sorted) for one level pair, or a skip record."""
    level = BorelCartanLevel(*pair)
    missing = sorted(level.relevant_levels() - store.coverage)
    if missing:
        return {"pair": list(pair), "rows": [], "skip": f"relevant levels not covered: {missing}"}
    cache: dict = {}
    rows = []
    for K in enumerate_subgroups(level):
        dec = decompose(QuotientCurve(level, K), store)
        for p in cfg.primes:
            if level.n % p == 0:
                continue
            for k in cfg.degrees(p):
                res = count_points(dec, p, k, cache)
                rows.append(ScanRow(dec.curve.notation(), res.genus, p, k, res.count, res.maximal).csv_fields())
    return {"pair": list(pair), "rows": rows, "skip": None}


def _checksum(entry: dict) -> str:
    body = json.dumps({k: entry[k] for k in ("pair", "rows", "skip")}, separators=(",", ":"))
    return hashlib.sha256(body.encode()).hexdigest()


def _journal_line(entry: dict) -> str:
    entry = dict(entry, sha256=_checksum(entry))
    return json.dumps(entry, separators=(",", ":")) + "\n"


def read_journal(path: Path) -> dict[tuple[int, int], dict]:
    done = {}
    if not path.exists():
        return done
    for line in path.read_text(encoding="utf-8").splitlines():
        try:
            entry = json.loads(line)
        except json.JSONDecodeError:
            continue
        if entry.get("sha256") == _checksum(entry):
            done[tuple(entry["pair"])] = entry
    return done


_WORKER: dict = {}


def _init_worker(cfg: ScanConfig, store: NewformStore) -> None:
    _WORKER["cfg"] = cfg
    _WORKER["store"] = store


def _work(pair: tuple[int, int]) -> dict:
    return scan_pair(pair, _WORKER["cfg"], _WORKER["store"])


def scan(cfg: ScanConfig, store: NewformStore | None = None) -> list[ScanRow]:
    """Run the scan, persisting rows under ``cfg.output``; returns all rows."""
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    journal = out / "journal.jsonl"
    done = read_journal(journal)
    pairs = cfg.pairs if cfg.pairs is not None else list(level_pairs(cfg.max_n))
    pairs = [pp for pp in pairs if pp[0] * pp[1] ** 2 <= cfg.max_n]
    todo = [pp for pp in pairs if pp not in done]
    log.info("scan: %d pairs, %d already journalled", len(pairs), len(pairs) - len(todo))
    if store is None:
        store = default_store(cfg.fixtures)
    with journal.open("a", encoding="utf-8") as jf:
        if cfg.threads == 1 or len(todo) <= 1:
            results: Iterable[dict] = (scan_pair(pp, cfg, store) for pp in todo)
            for entry in results:
                done[tuple(entry["pair"])] = entry
                jf.write(_journal_line(entry))
                jf.flush()
        else:
            with ProcessPoolExecutor(cfg.threads, initializer=_init_worker, initargs=(cfg, store)) as pool:
                for entry in pool.map(_work, todo, chunksize=4):
                    done[tuple(entry["pair"])] = entry
                    jf.write(_journal_line(entry))
                    jf.flush()
    entries = [done[pp] for pp in sorted(pairs)]
    tmp = journal.with_name(journal.name + ".tmp")
    tmp.write_text("".join(_journal_line(e) for e in entries), encoding="utf-8")
    os.replace(tmp, journal)
    rows = [ScanRow.from_fields(r) for e in entries for r in e["rows"]]
    write_rows(out / "rows.csv", rows)
    skips = [{"pair": e["pair"], "reason": e["skip"]} for e in entries if e["skip"]]
    (out / "skips.json").write_text(json.dumps(skips, indent=1) + "\n", encoding="utf-8")
    return rows


def write_rows(path: Path, rows: Iterable[ScanRow]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.csv_fields())
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_rows(path: str | os.PathLike) -> list[ScanRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        return [ScanRow.from_fields(r) for r in reader]


def best_table(rows: Iterable[ScanRow], g_range: tuple[int, int] | None = None,
               q_set: Iterable[int] | None = None) -> dict[tuple[int, int], ScanRow]:
    """Largest count per ``(genus, q)``; the first row in scan order wins ties."""
    qs = set(q_set) if q_set is not None else None
    best: dict[tuple[int, int], ScanRow] = {}
    for row in rows:
        if g_range is not None and not g_range[0] <= row.genus <= g_range[1]:
            continue
        if qs is not None and row.q not in qs:
            continue
        key = (row.genus, row.q)
        if key not in best or row.count > best[key].count:
            best[key] = row
    return dict(sorted(best.items()))


def maximal_table(rows: Iterable[ScanRow], store: NewformStore,
                  g_range: tuple[int, int] | None = None,
                  optimal: Mapping[tuple[int, int], int] | None = None,
                  ) -> dict[tuple[int, int, tuple[int, ...]], list[str]]:
    """Maximal curves of genus >= 2 grouped by ``(genus, q, real Weil polynomial)``.

    A row qualifies when it attains the Hasse-Weil-Serre bound, or when
    ``optimal`` gives the largest possible count for its ``(genus, q)`` and
    the row reaches it.  The polynomial key is its coefficient tuple in
    ascending powers.
    """
    optimal = optimal or {}
    groups: dict[tuple[int, int, tuple[int, ...]], list[str]] = {}
    for row in rows:
        if row.genus < 2:
            continue
        target = optimal.get((row.genus, row.q))
        if not (row.maximal or (target is not None and row.count >= target)):
            continue
        if g_range is not None and not g_range[0] <= row.genus <= g_range[1]:
            continue
        dec = decompose(QuotientCurve.parse(row.curve), store)
        h = real_weil_poly_of_curve(dec, row.p, row.k)
        groups.setdefault((row.genus, row.q, h.coeffs), []).append(row.curve)
    return dict(sorted(groups.items()))


def write_tables(out: Path, rows: list[ScanRow], store: NewformStore, cfg: ScanConfig) -> None:
    best = best_table(rows, cfg.genus_range)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["genus", "q", "count", "curve"])
    for (g, q), row in best.items():
        w.writerow([g, q, row.count, row.curve])
    (out / "best.csv").write_text(buf.getvalue(), encoding="utf-8")
    maximal = maximal_table(rows, store, cfg.genus_range, cfg.optimal())
    doc = [{"genus": g, "q": q, "real_weil_polynomial": list(h), "curves": curves}
           for (g, q, h), curves in maximal.items()]
    (out / "maximal.json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def config_dict(cfg: ScanConfig) -> dict:
    return asdict(cfg)
