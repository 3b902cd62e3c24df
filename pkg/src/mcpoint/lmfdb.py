"""Fetch weight-2 trivial-character newforms from the LMFDB API.

Each level is cached as one JSON file ``level_NNNNN.json`` under the cache
directory; fixture files are assembled from the cache on demand.  Requests
are sequential with exponential backoff on 429/5xx.

Two API collections are used:

* ``mf_newforms``: label, dim, Atkin-Lehner signs, traces of ``a_n``,
  ``hecke_orbit_code``;
* ``mf_hecke_nf``: coefficient field polynomial and ``a_p`` as coordinates
  in the Hecke ring basis.

The characteristic polynomial of ``T_p`` is the characteristic polynomial of
multiplication by ``a_p`` on the coefficient field; its trace must agree with
the published trace of ``a_p``.
"""
from __future__ import annotations

import json
import logging
import os
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable

from filelock import FileLock, Timeout

from .curves import factorize, is_prime, valuation
from .newforms import FixtureError, NewformRecord, NewformStore, SCHEMA_VERSION, dumps_canonical
from .polynomial import IntPolynomial, newton_power_sums, polynomial_from_power_sums

log = logging.getLogger(__name__)

DEFAULT_URL = "https://www.lmfdb.org"
URL_ENV = "MCPOINT_LMFDB_URL"
MAX_LEVEL = 10000
RETRY_STATUS = {429, 500, 502, 503, 504}


class FetchError(RuntimeError):
    pass


@dataclass
class FetchRequest:
    levels: set[int]
    primes_needed: set[int]
    cache_dir: Path
    offline: bool = False
    base_url: str = field(default_factory=lambda: os.environ.get(URL_ENV, DEFAULT_URL))
    timeout: float = 30.0
    retries: int = 5
    backoff: float = 1.0


class HttpTransport:
    """Sequential JSON-over-HTTP getter with exponential backoff."""

    def __init__(self, timeout: float = 30.0, retries: int = 5, backoff: float = 1.0,
                 sleep: Callable[[float], None] = time.sleep):
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.sleep = sleep
        self.requests = 0

    def __call__(self, url: str) -> dict:
        delay = self.backoff
        for attempt in range(self.retries + 1):
            self.requests += 1
            try:
                with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                    return json.loads(resp.read().decode("utf-8"))
            except urllib.error.HTTPError as exc:
                if exc.code not in RETRY_STATUS or attempt == self.retries:
                    raise FetchError(f"HTTP {exc.code} for {url}") from None
            except (urllib.error.URLError, TimeoutError, OSError) as exc:
                if attempt == self.retries:
                    raise FetchError(f"request failed for {url}: {exc}") from None
            except json.JSONDecodeError as exc:
                raise FetchError(f"invalid JSON from {url}: {exc}") from None
            log.info("retrying %s in %.1fs", url, delay)
            self.sleep(delay)
            delay *= 2
        raise FetchError(f"giving up on {url}")  # pragma: no cover


def _api_url(base: str, collection: str, **query) -> str:
    params = {k: (f"i{v}" if isinstance(v, int) else v) for k, v in query.items()}
    params["_format"] = "json"
    return f"{base.rstrip('/')}/api/{collection}/?{urllib.parse.urlencode(params)}"


def _paged(get, url: str) -> list[dict]:
    out = []
    while url:
        doc = get(url)
        out.extend(doc.get("data", []))
        nxt = doc.get("next")
        url = urllib.parse.urljoin(url, nxt) if nxt else None
    return out


def charpoly_from_field(field_poly: list[int], coords: list[int], numerators=None,
                        denominators=None, power_basis: bool = True) -> IntPolynomial:
    """Characteristic polynomial of multiplication by ``sum coords[i] * beta_i``.

    ``beta_i = nu^i`` for a power basis, else
    ``(sum_j numerators[i][j] nu^j) / denominators[i]`` with ``nu`` a root of
    ``field_poly`` (ascending coefficients, monic).
    """
    F = IntPolynomial(field_poly)
    d = F.degree
    g = [Fraction(0)] * d
    for i, c in enumerate(coords):
        if not c:
            continue
        if power_basis:
            g[i] += c
        else:
            for j, num in enumerate(numerators[i]):
                g[j] += Fraction(c * num, denominators[i])
    nu_sums = [d] + newton_power_sums(F, d * d)
    traces = []
    power = [Fraction(1)]
    for _ in range(d):
        prod_ = [Fraction(0)] * (len(power) + len(g) - 1)
        for i, a in enumerate(power):
            if a:
                for j, b in enumerate(g):
                    prod_[i + j] += a * b
        power = prod_
        t = sum(c * nu_sums[m] for m, c in enumerate(power))
        if t.denominator != 1:
            raise FetchError(f"non-integral trace {t}: eigenvalue is not an algebraic integer")
        traces.append(int(t))
    return polynomial_from_power_sums(traces)


def _primes_upto(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if is_prime(p)]


def records_from_api(level: int, forms: list[dict], hecke: dict[int, dict], primes: Iterable[int]) -> list[dict]:
    """Turn ``mf_newforms`` rows (plus ``mf_hecke_nf`` rows by orbit code) into fixture records."""
    prime_powers = {p: p ** valuation(level, p) for p, _ in factorize(level)} if level > 1 else {}
    out = []
    for form in sorted(forms, key=lambda f: f["label"]):
        label, dim = form["label"], form["dim"]
        al_raw = form.get("atkin_lehner_eigenvals")
        if al_raw is None:
            raise FetchError(f"{label}: response missing Atkin-Lehner data")
        al = {}
        for p, sign in al_raw:
            if p not in prime_powers:
                raise FetchError(f"{label}: Atkin-Lehner entry for {p}, which does not divide {level}")
            al[prime_powers[p]] = sign
        if set(al) != set(prime_powers.values()):
            raise FetchError(f"{label}: response missing Atkin-Lehner data")
        traces = form.get("traces") or []
        nf = hecke.get(form.get("hecke_orbit_code"))
        charpolys = {}
        for p in sorted(primes):
            if level % p == 0:
                continue
            if len(traces) < p:
                raise FetchError(f"{label}: no trace of a_{p} in response")
            published = traces[p - 1]
            if dim == 1:
                C = IntPolynomial([-published, 1])
            else:
                if nf is None:
                    raise FetchError(f"{label}: no Hecke eigenvalue data for a form of dimension {dim}")
                plist = _primes_upto(p)
                ap = nf.get("ap") or []
                if len(ap) < len(plist):
                    raise FetchError(f"{label}: a_{p} not available in eigenvalue data")
                C = charpoly_from_field(
                    nf["field_poly"], ap[len(plist) - 1],
                    nf.get("hecke_ring_numerators"), nf.get("hecke_ring_denominators"),
                    bool(nf.get("hecke_ring_power_basis", False)))
            if C.degree != dim:
                raise FetchError(f"{label}: inconsistent dimension (charpoly degree {C.degree}, dim {dim})")
            if -C[dim - 1] != published:
                raise FetchError(f"{label}: trace of a_{p} is {-C[dim - 1]}, API publishes {published}")
            charpolys[str(p)] = C.to_list()
        out.append({
            "label": label, "level": level, "dim": dim,
            "al_signs": sorted([q, s] for q, s in al.items()),
            "al_extended": [],
            "hecke_charpolys": charpolys,
        })
    return out


def _cache_path(cache_dir: Path, level: int) -> Path:
    return Path(cache_dir) / f"level_{level:05d}.json"


def read_cached_level(cache_dir: Path, level: int) -> dict | None:
    path = _cache_path(cache_dir, level)
    if not path.exists():
        return None
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FixtureError(f"corrupt cache file {path}: {exc}") from None
    if doc.get("schema_version") != SCHEMA_VERSION or doc.get("level") != level:
        raise FixtureError(f"cache file {path} does not describe level {level}")
    return doc


def _cached_primes(doc: dict) -> set[int]:
    """Primes for which every record in a cached level has a charpoly."""
    if not doc["records"]:
        return set(doc.get("primes", []))
    sets = [set(map(int, r["hecke_charpolys"])) for r in doc["records"]]
    return set.intersection(*sets)


def write_cached_level(cache_dir: Path, level: int, records: list[dict], primes: Iterable[int],
                       source: str) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "level": level, "source": source,
           "primes": sorted(set(primes)), "records": records}
    path = _cache_path(cache_dir, level)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dumps_canonical(doc), encoding="utf-8")
    os.replace(tmp, path)


def store_from_cache(cache_dir: Path, levels: Iterable[int]) -> NewformStore:
    """Fixture store assembled from cached levels (all must be present)."""
    records = []
    levels = sorted(set(levels))
    for level in levels:
        doc = read_cached_level(cache_dir, level)
        if doc is None:
            raise FixtureError(f"level {level} is not in the cache {cache_dir}")
        records.extend(NewformRecord.from_json(r) for r in doc["records"])
    return NewformStore(records, levels)


def fetch_levels(req: FetchRequest, transport: Callable[[str], dict] | None = None,
                 output: Path | None = None) -> NewformStore:
    """Download (or read from cache) every requested level and return the fixture store."""
    for n in req.levels:
        if not 1 <= n <= MAX_LEVEL:
            raise FetchError(f"level {n} outside the database range 1..{MAX_LEVEL}")
    bad = [p for p in req.primes_needed if not is_prime(p)]
    if bad:
        raise FetchError(f"not prime: {sorted(bad)}")
    cache_dir = Path(req.cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    get = transport or HttpTransport(req.timeout, req.retries, req.backoff)
    lock = FileLock(str(cache_dir / ".lock"))
    try:
        lock.acquire(timeout=0)
    except Timeout:
        raise FetchError(f"cache {cache_dir} is locked by another fetch") from None
    try:
        for level in sorted(req.levels):
            wanted = {p for p in req.primes_needed if level % p}
            doc = read_cached_level(cache_dir, level)
            if doc is not None and wanted <= _cached_primes(doc):
                continue
            if req.offline:
                raise FetchError(f"level {level} (primes {sorted(wanted)}) not in cache and offline mode is on")
            _fetch_one(req.base_url, get, cache_dir, level, wanted)
    finally:
        lock.release()
    store = store_from_cache(cache_dir, req.levels)
    if output is not None:
        store.dump(output)
    return store


def _fetch_one(base: str, get, cache_dir: Path, level: int, primes: set[int]) -> None:
    url = _api_url(base, "mf_newforms", level=level, weight=2, char_order=1,
                   _fields="label,level,dim,atkin_lehner_eigenvals,traces,hecke_orbit_code")
    forms = _paged(get, url)
    forms = [f for f in forms if f.get("level", level) == level]
    hecke = {}
    for form in forms:
        if form["dim"] > 1:
            url = _api_url(base, "mf_hecke_nf", hecke_orbit_code=form["hecke_orbit_code"],
                           _fields="hecke_orbit_code,field_poly,ap,hecke_ring_numerators,"
                                   "hecke_ring_denominators,hecke_ring_power_basis")
            rows = _paged(get, url)
            if rows:
                hecke[form["hecke_orbit_code"]] = rows[0]
    records = records_from_api(level, forms, hecke, primes)
    for r in records:
        NewformRecord.from_json(r)
    write_cached_level(cache_dir, level, records, primes, "lmfdb")
    log.info("level %d: %d newform classes", level, len(records))
