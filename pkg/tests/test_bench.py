"""Benchmark record schema and harness behavior."""

import json

import pytest

from osaucs import (
    BenchRecord,
    make_ingamut_lgj,
    run_all,
    run_cubic_bench,
    run_inverse_bench,
)

EXPECTED_KEYS = [
    "kind",
    "size",
    "seconds",
    "ratio_to_cbrt",
    "cubic_cardano_seconds",
    "cubic_newton_seconds",
]


class TestRecordSchema:
    def test_json_has_all_keys_in_order(self):
        rec = BenchRecord(kind="inverse_batch", size=64, seconds=0.5, ratio_to_cbrt=10.0)
        obj = json.loads(rec.to_json())
        assert list(obj.keys()) == EXPECTED_KEYS

    def test_inapplicable_fields_are_null(self):
        rec = BenchRecord(kind="inverse_batch", size=64, seconds=0.5, ratio_to_cbrt=10.0)
        obj = json.loads(rec.to_json())
        assert obj["cubic_cardano_seconds"] is None
        assert obj["cubic_newton_seconds"] is None
        rec = BenchRecord(
            kind="cubic_solver",
            size=64,
            seconds=0.1,
            cubic_cardano_seconds=0.1,
            cubic_newton_seconds=0.4,
        )
        obj = json.loads(rec.to_json())
        assert obj["ratio_to_cbrt"] is None


class TestCorpus:
    def test_ingamut_corpus_is_convertible(self):
        batch = make_ingamut_lgj(512, seed=0)
        assert len(batch) == 512

    def test_corpus_is_seeded(self):
        one = make_ingamut_lgj(64, seed=5)
        two = make_ingamut_lgj(64, seed=5)
        assert (one.c0 == two.c0).all()
        other = make_ingamut_lgj(64, seed=6)
        assert not (one.c0 == other.c0).all()


class TestRuns:
    def test_inverse_records(self):
        records = run_inverse_bench([16, 64], repeats=1, seed=0)
        assert [r.size for r in records] == [16, 64]
        for r in records:
            assert r.kind == "inverse_batch"
            assert r.seconds > 0.0
            assert r.ratio_to_cbrt > 0.0
            assert r.cubic_cardano_seconds is None

    def test_cubic_records(self):
        records = run_cubic_bench([32], repeats=2, seed=0)
        (rec,) = records
        assert rec.kind == "cubic_solver"
        assert rec.cubic_cardano_seconds > 0.0
        assert rec.cubic_newton_seconds > 0.0
        assert rec.seconds == rec.cubic_cardano_seconds
        assert rec.ratio_to_cbrt is None

    def test_run_all_covers_both_kinds(self):
        records = run_all(sizes=[8], repeats=1, seed=1)
        kinds = {r.kind for r in records}
        assert kinds == {"inverse_batch", "cubic_solver"}

    def test_records_serialize_line_per_record(self):
        records = run_all(sizes=[8, 16], repeats=1, seed=1)
        lines = [r.to_json() for r in records]
        assert len(lines) == 4
        for line in lines:
            parsed = json.loads(line)
            assert "\n" not in line
            assert parsed["size"] in (8, 16)
