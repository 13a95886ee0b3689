"""Append-only JSON-lines store for run records."""

from __future__ import annotations

import datetime
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from .domain import ScenarioConfig

log = logging.getLogger(__name__)

STORE_ENV_VAR = "LOOMLINE_STORE"


class DuplicateRunError(KeyError):
    pass


class RunNotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class RunRecord:
    run_id: str
    created_at: str  # UTC ISO-8601
    scenario: ScenarioConfig
    report: dict  # serialized RunReport
    profile_name: str

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "scenario": self.scenario.to_dict(),
            "report": self.report,
            "profile_name": self.profile_name,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            run_id=data["run_id"],
            created_at=data["created_at"],
            scenario=ScenarioConfig.from_dict(data["scenario"]),
            report=data["report"],
            profile_name=data["profile_name"],
        )


def now_utc() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


class RunStore:
    """Single JSON-lines file, one RunRecord per line, appended and never rewritten.

    A truncated final line (interrupted write) is skipped with a warning on
    open; all prior records remain loadable.
    """

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self._records: dict[str, RunRecord] = {}
        self._order: list[str] = []
        if self.path.exists():
            self._load()

    def _load(self):
        with open(self.path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                stripped = line.strip()
                if not stripped:
                    continue
                try:
                    record = RunRecord.from_dict(json.loads(stripped))
                except (json.JSONDecodeError, KeyError):
                    log.warning("%s line %d: skipping unreadable record", self.path, lineno)
                    continue
                self._records[record.run_id] = record
                self._order.append(record.run_id)

    def next_run_id(self, rng_suffix: str) -> str:
        return f"run-{len(self._order):06d}-{rng_suffix}"

    def save_run(self, record: RunRecord) -> str:
        if record.run_id in self._records:
            raise DuplicateRunError(f"run_id already stored: {record.run_id}")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())
        self._records[record.run_id] = record
        self._order.append(record.run_id)
        return record.run_id

    def load_run(self, run_id: str) -> RunRecord:
        try:
            return self._records[run_id]
        except KeyError:
            raise RunNotFoundError(f"no such run: {run_id}") from None

    def list_runs(self, **scenario_filters) -> list[dict]:
        """Summaries in creation order; keyword filters match scenario fields."""
        out = []
        for run_id in self._order:
            record = self._records[run_id]
            if any(
                getattr(record.scenario, k) != v for k, v in scenario_filters.items()
            ):
                continue
            summary = record.report.get("summary", {})
            out.append(
                {
                    "run_id": run_id,
                    "created_at": record.created_at,
                    "profile_name": record.profile_name,
                    "garment_count": record.scenario.garment_count,
                    "total_time": summary.get("total_time"),
                    "green_efficiency": summary.get("green_efficiency"),
                }
            )
        return out
