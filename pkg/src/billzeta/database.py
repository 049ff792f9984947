"""Orbit database: every primitive cycle up to a length cutoff, solved
and equipped with stability data, plus the JSON-lines cache format.

The cache is keyed by a content hash of the configuration so stale data
is refused rather than silently reused.  Records are kept sorted by
(length, word); every consumer iterates in that order, which is what
makes downstream output byte-reproducible regardless of worker count.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import geometry, orbits, stability, symbolic
from .errors import DomainError, MalformedInputError, StaleCacheError

SOLVER_VERSION = 2
CACHE_FORMAT = "billzeta-orbit-cache/1"


@dataclass(frozen=True)
class OrbitRecord:
    """Solved primitive cycle with stability attached (one cache line)."""

    word: tuple
    T: float
    angles: np.ndarray
    flights: np.ndarray
    cos_incidence: np.ndarray
    residual: float
    kappa: np.ndarray
    lam: float  # signed expanding eigenvalue per primitive period
    shadow_margin: float

    @property
    def n(self) -> int:
        return len(self.word)

    @property
    def lam_abs(self) -> float:
        return abs(self.lam)

    @property
    def sign(self) -> int:
        return -1 if self.lam < 0 else 1

    @property
    def d_gamma(self) -> float:
        return float(np.log(abs(self.lam)))

    def det_one_minus_p(self, r: int = 1) -> float:
        return stability.det_one_minus_poincare(self.lam, r)


class OrbitDatabase:
    def __init__(self, config, n_max: int, records):
        self.config = config
        self.config_hash = geometry.config_digest(config)
        self.n_max = int(n_max)
        self.records = sorted(records, key=lambda rec: (rec.n, rec.word))
        self.by_word = {rec.word: rec for rec in self.records}

    def __len__(self):
        return len(self.records)

    @property
    def max_primitive_period(self) -> float:
        return max(rec.T for rec in self.records)

    def record_for(self, word) -> OrbitRecord:
        word = tuple(word)
        rec = self.by_word.get(word)
        if rec is None:
            raise DomainError(f"orbit database has no cycle {word}")
        return rec


def _solve_one(config, word):
    orbit = orbits.solve_orbit(config, word)
    stab = stability.stability_record(config, orbit)
    return OrbitRecord(
        word=orbit.word,
        T=orbit.T,
        angles=orbit.angles,
        flights=orbit.flights,
        cos_incidence=orbit.cos_incidence,
        residual=orbit.residual,
        kappa=stab.kappa,
        lam=stab.lam,
        shadow_margin=orbit.shadow_margin,
    )


def build_database(config, n_max: int, jobs: int = 1) -> OrbitDatabase:
    """Solve every primitive cycle of length 2..n_max.

    The configuration is validated first; a failing configuration is a
    domain error.  ``jobs`` sizes a thread pool; results are re-sorted
    afterwards, so the worker count cannot affect the content.
    """
    report = geometry.validate(config)
    if not report.ok:
        raise DomainError(f"configuration rejected: {report.summary()}")
    words = symbolic.enumerate_cycles(config.r, n_max)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda w: _solve_one(config, w), words))
    else:
        records = [_solve_one(config, w) for w in words]
    return OrbitDatabase(config, n_max, records)


def _record_to_json(rec: OrbitRecord) -> dict:
    return {
        "word": list(rec.word),
        "angles": [float(v) for v in rec.angles],
        "T": float(rec.T),
        "flights": [float(v) for v in rec.flights],
        "cos_incidence": [float(v) for v in rec.cos_incidence],
        "residual": float(rec.residual),
        "kappa": [float(v) for v in rec.kappa],
        "lam": float(rec.lam),
        "shadow_margin": float(rec.shadow_margin),
        "solver_version": SOLVER_VERSION,
    }


def _record_from_json(obj) -> OrbitRecord:
    if obj.get("solver_version") != SOLVER_VERSION:
        raise StaleCacheError(
            f"cache record has solver_version {obj.get('solver_version')}, "
            f"expected {SOLVER_VERSION}; rebuild with `billzeta orbits`"
        )
    return OrbitRecord(
        word=tuple(int(v) for v in obj["word"]),
        T=float(obj["T"]),
        angles=np.array(obj["angles"], dtype=float),
        flights=np.array(obj["flights"], dtype=float),
        cos_incidence=np.array(obj["cos_incidence"], dtype=float),
        residual=float(obj["residual"]),
        kappa=np.array(obj["kappa"], dtype=float),
        lam=float(obj["lam"]),
        shadow_margin=float(obj.get("shadow_margin", np.inf)),
    )


def save_database(db: OrbitDatabase, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = {
            "format": CACHE_FORMAT,
            "config": db.config.to_dict(),
            "config_hash": db.config_hash,
            "n_max": db.n_max,
            "solver_version": SOLVER_VERSION,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in db.records:
            fh.write(json.dumps(_record_to_json(rec), sort_keys=True) + "\n")


def load_database(path, config=None) -> OrbitDatabase:
    """Read a cache written by :func:`save_database`, refusing hash or
    schema mismatches.

    The cache embeds its configuration, so ``config`` is optional; when
    given, its digest must match the cached one or the cache is stale.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise MalformedInputError(f"cannot read orbit cache {path}: {exc}") from exc
    if not lines:
        raise MalformedInputError(f"orbit cache {path} is empty")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"orbit cache {path} has a bad header") from exc
    if header.get("format") != CACHE_FORMAT:
        raise MalformedInputError(
            f"orbit cache {path}: unknown format {header.get('format')!r}"
        )
    if header.get("solver_version") != SOLVER_VERSION:
        raise StaleCacheError(
            f"orbit cache {path} was written by solver version "
            f"{header.get('solver_version')!r}, this build expects {SOLVER_VERSION}; "
            f"re-run `billzeta orbits` to rebuild it"
        )
    if "config" not in header:
        raise MalformedInputError(f"orbit cache {path} carries no configuration")
    cached = geometry.config_from_dict(header["config"])
    if geometry.config_digest(cached) != header.get("config_hash"):
        raise MalformedInputError(
            f"orbit cache {path}: embedded configuration does not match its hash"
        )
    if config is not None:
        want = geometry.config_digest(config)
        if header.get("config_hash") != want:
            raise StaleCacheError(
                f"orbit cache {path} was built for configuration "
                f"{header.get('config_hash', '?')[:12]}..., current configuration is "
                f"{want[:12]}...; re-run `billzeta orbits --config <file> --cache "
                f"{path}` to rebuild it"
            )
    records = []
    for line in lines[1:]:
        if not line.strip():
            continue
        records.append(_record_from_json(json.loads(line)))
    return OrbitDatabase(cached, int(header.get("n_max", 0)), records)
