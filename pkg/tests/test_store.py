import json

import pytest

from loomline.domain import ScenarioConfig
from loomline.store import (
    DuplicateRunError,
    RunNotFoundError,
    RunRecord,
    RunStore,
    now_utc,
)


def make_record(run_id, garment_count=10, total_time=80.7):
    return RunRecord(
        run_id=run_id,
        created_at=now_utc(),
        scenario=ScenarioConfig(garment_count=garment_count),
        report={"summary": {"total_time": total_time, "green_efficiency": 0.72}},
        profile_name="ResNest-101",
    )


@pytest.fixture
def store(tmp_path):
    return RunStore(tmp_path / "runs.jsonl")


class TestSaveLoad:
    def test_round_trip(self, store):
        record = make_record("run-1")
        store.save_run(record)
        assert store.load_run("run-1") == record

    def test_duplicate_id_conflict(self, store):
        store.save_run(make_record("run-1"))
        with pytest.raises(DuplicateRunError):
            store.save_run(make_record("run-1"))

    def test_unknown_id_not_found(self, store):
        with pytest.raises(RunNotFoundError):
            store.load_run("nope")

    def test_persists_across_reopen(self, store, tmp_path):
        store.save_run(make_record("run-1"))
        reopened = RunStore(tmp_path / "runs.jsonl")
        assert reopened.load_run("run-1") == store.load_run("run-1")

    def test_hundred_records_listed_in_creation_order(self, store):
        ids = [f"run-{i:03d}" for i in range(100)]
        for run_id in ids:
            store.save_run(make_record(run_id))
        assert [r["run_id"] for r in store.list_runs()] == ids


class TestListRuns:
    def test_empty(self, store):
        assert store.list_runs() == []

    def test_filter_by_garment_count(self, store):
        store.save_run(make_record("a", garment_count=10))
        store.save_run(make_record("b", garment_count=12))
        store.save_run(make_record("c", garment_count=12))
        rows = store.list_runs(garment_count=12)
        assert [r["run_id"] for r in rows] == ["b", "c"]

    def test_summary_fields(self, store):
        store.save_run(make_record("a", total_time=93.6))
        row = store.list_runs()[0]
        assert row["total_time"] == 93.6
        assert row["green_efficiency"] == 0.72
        assert row["garment_count"] == 10


class TestCrashSafety:
    def test_truncated_final_line_skipped(self, tmp_path, caplog):
        path = tmp_path / "runs.jsonl"
        store = RunStore(path)
        store.save_run(make_record("run-1"))
        store.save_run(make_record("run-2"))
        with open(path, "a", encoding="utf-8") as f:
            f.write('{"run_id": "run-3", "created_a')  # interrupted write
        reopened = RunStore(path)
        assert [r["run_id"] for r in reopened.list_runs()] == ["run-1", "run-2"]

    def test_append_only(self, tmp_path):
        path = tmp_path / "runs.jsonl"
        store = RunStore(path)
        store.save_run(make_record("run-1"))
        first = path.read_text()
        store.save_run(make_record("run-2"))
        assert path.read_text().startswith(first)
        lines = path.read_text().splitlines()
        assert json.loads(lines[0])["run_id"] == "run-1"
