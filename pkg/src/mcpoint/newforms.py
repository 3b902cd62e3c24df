"""Weight-2 newform classes and the canonical fixture format.

A fixture file is a JSON document::

    {"schema_version": 1,
     "coverage": [levels for which the file lists every newform class],
     "records": [{"label", "level", "dim", "al_signs": [[q, +-1], ...],
                  "al_extended": [[q, +-1], ...],
                  "hecke_charpolys": {"p": [c0, ..., 1]}}, ...]}

Serialization is canonical (sorted labels, numerically sorted keys, no
whitespace variation) so equal stores give byte-identical files.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .curves import factorize, is_prime
from .polynomial import IntPolynomial, PolynomialError, check_weil_bound

SCHEMA_VERSION = 1
FIXTURES_ENV = "MCPOINT_FIXTURES"
BUNDLED_FIXTURES = Path(__file__).parent / "data" / "newforms.json"


class FixtureError(ValueError):
    pass


class CoverageError(LookupError):
    pass


@dataclass(frozen=True)
class NewformRecord:
    label: str
    level: int
    dim: int
    al_signs: Mapping[int, int]
    hecke_charpolys: Mapping[int, IntPolynomial]
    al_extended: Mapping[int, int] = field(default_factory=dict)

    def validate(self) -> None:
        """Raise :class:`FixtureError` naming the label and the broken invariant."""
        where = f"record {self.label!r}"
        if not isinstance(self.level, int) or self.level < 1:
            raise FixtureError(f"{where}: level must be a positive integer")
        if not isinstance(self.dim, int) or self.dim < 1:
            raise FixtureError(f"{where}: dim must be a positive integer")
        expected = {p**e for p, e in factorize(self.level)} if self.level > 1 else set()
        missing = expected - set(self.al_signs)
        if missing:
            raise FixtureError(f"{where}: missing Atkin-Lehner sign for {sorted(missing)}")
        extra = set(self.al_signs) - expected
        if extra:
            raise FixtureError(f"{where}: al_signs keys {sorted(extra)} are not prime powers exactly dividing {self.level}")
        for table in (self.al_signs, self.al_extended):
            for q, s in table.items():
                if s not in (1, -1):
                    raise FixtureError(f"{where}: sign for {q} is {s}, expected +1 or -1")
        for q in self.al_extended:
            if q < 2 or len(factorize(q)) != 1 or factorize(q)[0][0] in {p for p, _ in factorize(self.level)}:
                raise FixtureError(f"{where}: al_extended key {q} must be a prime power coprime to the level")
        for p, C in self.hecke_charpolys.items():
            if not is_prime(p):
                raise FixtureError(f"{where}: charpoly key {p} is not prime")
            if self.level % p == 0:
                raise FixtureError(f"{where}: charpoly at bad prime {p}")
            if not C.is_monic():
                raise FixtureError(f"{where}: charpoly at {p} is not monic")
            if C.degree != self.dim:
                raise FixtureError(f"{where}: charpoly at {p} has degree {C.degree}, dim is {self.dim}")
            try:
                check_weil_bound(C, p)
            except PolynomialError as exc:
                raise FixtureError(f"{where}: Weil bound violated at p={p}: {exc}") from None

    def __hash__(self) -> int:
        return hash((self.label, self.level, self.dim))

    def charpoly(self, p: int) -> IntPolynomial:
        try:
            return self.hecke_charpolys[p]
        except KeyError:
            raise CoverageError(f"no Hecke charpoly at p={p} for {self.label}") from None

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "dim": self.dim,
            "al_signs": [[q, s] for q, s in sorted(self.al_signs.items())],
            "al_extended": [[q, s] for q, s in sorted(self.al_extended.items())],
            "hecke_charpolys": {str(p): C.to_list() for p, C in sorted(self.hecke_charpolys.items())},
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> NewformRecord:
        label = obj.get("label", "<unlabelled>") if isinstance(obj, Mapping) else "<not an object>"
        try:
            allowed = {"label", "level", "dim", "al_signs", "al_extended", "hecke_charpolys"}
            unknown = set(obj) - allowed
            if unknown:
                raise FixtureError(f"unknown fields {sorted(unknown)}")
            rec = cls(
                label=str(obj["label"]),
                level=obj["level"],
                dim=obj["dim"],
                al_signs=_sign_map(obj["al_signs"]),
                al_extended=_sign_map(obj.get("al_extended", [])),
                hecke_charpolys={int(p): IntPolynomial(_int_list(cs)) for p, cs in obj["hecke_charpolys"].items()},
            )
        except FixtureError as exc:
            raise FixtureError(f"record {label!r}: schema violation: {exc}") from None
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise FixtureError(f"record {label!r}: schema violation: {exc!r}") from None
        rec.validate()
        return rec


def _int_list(values) -> list[int]:
    if not isinstance(values, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise FixtureError(f"expected a list of integers, got {values!r}")
    return values


def _sign_map(pairs) -> dict[int, int]:
    out: dict[int, int] = {}
    for pair in pairs:
        q, s = _int_list(pair)
        if q in out:
            raise FixtureError(f"duplicate sign entry for {q}")
        out[q] = s
    return out


class NewformStore:
    """Immutable collection of newform records plus the levels it fully covers."""

    def __init__(self, records: Iterable[NewformRecord] = (), coverage: Iterable[int] = ()):
        by_label: dict[str, NewformRecord] = {}
        for rec in records:
            if rec.label in by_label:
                raise FixtureError(f"duplicate label {rec.label!r}")
            by_label[rec.label] = rec
        self._records = dict(sorted(by_label.items()))
        self.coverage = frozenset(int(n) for n in coverage)
        self._by_level: dict[int, list[NewformRecord]] = {}
        for rec in self._records.values():
            self._by_level.setdefault(rec.level, []).append(rec)
        uncovered = set(self._by_level) - self.coverage
        if uncovered:
            raise FixtureError(f"records at levels {sorted(uncovered)} outside the declared coverage")

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records.values())

    def __getitem__(self, label: str) -> NewformRecord:
        return self._records[label]

    def __eq__(self, other) -> bool:
        return (isinstance(other, NewformStore) and self.coverage == other.coverage
                and self._records == other._records)

    def records(self) -> set[NewformRecord]:
        return set(self._records.values())

    def covers(self, levels: Iterable[int]) -> bool:
        return all(n in self.coverage for n in levels)

    def newforms_of_level(self, N: int) -> list[NewformRecord]:
        if N not in self.coverage:
            raise CoverageError(f"level {N} is not covered by the fixture data")
        return list(self._by_level.get(N, []))

    def merged(self, other: NewformStore) -> NewformStore:
        overlap = self.coverage & other.coverage
        for n in overlap:
            mine = {r.label: r for r in self._by_level.get(n, [])}
            theirs = {r.label: r for r in other._by_level.get(n, [])}
            if mine != theirs:
                raise FixtureError(f"conflicting data for level {n}")
        recs = {r.label: r for r in self}
        recs.update({r.label: r for r in other})
        return NewformStore(recs.values(), self.coverage | other.coverage)

    def restricted(self, levels: Iterable[int]) -> NewformStore:
        keep = set(levels) & self.coverage
        return NewformStore((r for r in self if r.level in keep), keep)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "coverage": sorted(self.coverage),
            "records": [r.to_json() for r in self],
        }

    def dumps(self) -> str:
        return dumps_canonical(self.to_json())

    def dump(self, path: str | os.PathLike) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(self.dumps(), encoding="utf-8")
        os.replace(tmp, path)

    @classmethod
    def from_json(cls, doc, levels: Iterable[int] | None = None) -> NewformStore:
        """Validate a fixture document; ``levels`` restricts parsing to those levels."""
        if not isinstance(doc, dict):
            raise FixtureError("schema violation: top level must be an object")
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise FixtureError(f"schema violation: unsupported schema_version {doc.get('schema_version')!r}")
        for key in ("coverage", "records"):
            if not isinstance(doc.get(key), list):
                raise FixtureError(f"schema violation: {key!r} must be a list")
        coverage = set(_int_list(doc["coverage"]))
        records = doc["records"]
        if levels is not None:
            coverage &= set(levels)
            records = [r for r in records if not isinstance(r, dict) or r.get("level") in coverage]
        return cls((NewformRecord.from_json(r) for r in records), coverage)

    @classmethod
    def loads(cls, text: str, levels: Iterable[int] | None = None) -> NewformStore:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FixtureError(f"schema violation: invalid JSON: {exc}") from None
        return cls.from_json(doc, levels)


def dumps_canonical(doc) -> str:
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False) + "\n"


def load_fixtures(path: str | os.PathLike, levels: Iterable[int] | None = None) -> NewformStore:
    """Load and validate a fixture file, or every ``*.json`` file in a directory.

    With ``levels`` only records (and coverage) at those levels are kept.
    """
    path = Path(path)
    if levels is not None:
        levels = set(levels)
    if path.is_dir():
        files = sorted(path.glob("*.json"))
        if not files:
            raise FixtureError(f"no fixture files in {path}")
        store = NewformStore()
        for f in files:
            store = store.merged(load_fixtures(f, levels))
        return store
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FixtureError(f"cannot read fixtures {path}: {exc}") from None
    return NewformStore.loads(text, levels)


def newforms_of_level(store: NewformStore, N: int) -> list[NewformRecord]:
    return store.newforms_of_level(N)


def fixtures_path(path: str | os.PathLike | None = None) -> Path:
    """``path``, else ``$MCPOINT_FIXTURES``, else the bundled fixture file."""
    if path is None:
        path = os.environ.get(FIXTURES_ENV) or BUNDLED_FIXTURES
    return Path(path).resolve()


_CACHE: dict[str, NewformStore] = {}


def default_store(path: str | os.PathLike | None = None) -> NewformStore:
    """Fully loaded store for :func:`fixtures_path`, memoized per path."""
    key = str(fixtures_path(path))
    if key not in _CACHE:
        _CACHE[key] = load_fixtures(key)
    return _CACHE[key]
