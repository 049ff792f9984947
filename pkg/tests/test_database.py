import json

import numpy as np
import pytest

from billzeta.database import build_database, load_database, save_database
from billzeta.errors import DomainError, MalformedInputError, StaleCacheError
from billzeta.stability import det_one_minus_poincare
from billzeta.symbolic import primitive_class_count
from tests.conftest import equilateral_config


def test_counts_per_length_match_class_counts(db12):
    for n in range(2, 13):
        got = sum(1 for rec in db12.records if rec.n == n)
        assert got == primitive_class_count(3, n)


def test_records_sorted_and_indexed(db12):
    keys = [(rec.n, rec.word) for rec in db12.records]
    assert keys == sorted(keys)
    rec = db12.record_for((1, 2))
    assert rec.word == (1, 2)
    with pytest.raises(DomainError):
        db12.record_for((1, 2, 1, 2))


def test_record_repetition_determinant(db12):
    rec = db12.record_for((1, 2, 3))
    for r in range(1, 5):
        assert rec.det_one_minus_p(r) == det_one_minus_poincare(rec.lam, r)


def test_round_trip_preserves_everything(tmp_path, db8):
    path = tmp_path / "cache.jsonl"
    save_database(db8, path)
    back = load_database(path)
    assert back.config_hash == db8.config_hash
    assert back.n_max == db8.n_max
    assert len(back) == len(db8)
    for a, b in zip(db8.records, back.records):
        assert a.word == b.word
        assert a.T == b.T
        assert a.lam == b.lam
        assert np.array_equal(a.angles, b.angles)
        assert np.array_equal(a.flights, b.flights)
        assert np.array_equal(a.kappa, b.kappa)


def test_stale_cache_refused(tmp_path, db8):
    path = tmp_path / "cache.jsonl"
    save_database(db8, path)
    other = equilateral_config(radius=0.9)
    with pytest.raises(StaleCacheError):
        load_database(path, other)
    # matching configuration passes the same gate
    load_database(path, db8.config)


def test_corrupt_cache_refused(tmp_path, db8):
    path = tmp_path / "cache.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(MalformedInputError):
        load_database(path)
    path.write_text("not json\n", encoding="utf-8")
    with pytest.raises(MalformedInputError):
        load_database(path)
    with pytest.raises(MalformedInputError):
        load_database(tmp_path / "missing.jsonl")


def test_solver_version_mismatch_refused(tmp_path, db8):
    path = tmp_path / "cache.jsonl"
    save_database(db8, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    header["solver_version"] = 9999
    lines[0] = json.dumps(header, sort_keys=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(StaleCacheError):
        load_database(path)


def test_worker_count_does_not_change_content(config):
    serial = build_database(config, 6, jobs=1)
    threaded = build_database(config, 6, jobs=4)
    assert [r.word for r in serial.records] == [r.word for r in threaded.records]
    for a, b in zip(serial.records, threaded.records):
        assert a.T == b.T
        assert a.lam == b.lam
        assert np.array_equal(a.angles, b.angles)


def test_eclipsing_configuration_rejected():
    from billzeta.geometry import Configuration, Disk

    cfg = Configuration(
        (Disk((0.0, 0.0), 1.0), Disk((8.0, 0.0), 1.0), Disk((4.0, 0.5), 1.0))
    )
    with pytest.raises(DomainError):
        build_database(cfg, 4)
