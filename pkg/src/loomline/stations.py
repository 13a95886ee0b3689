"""Station service-time laws, error injection, pipeline topology, and run reports."""

from __future__ import annotations

import io
import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .domain import Garment, MaterialClass, ScenarioConfig, generate_garments, validate_scenario
from .kernel import EventQueue, SimEvent, derive_stream, run_to_completion

PIPELINE_ORDER = ("conveyor", "camera", "arm", "laser")

# Nominal per-item service at speed 1; chosen so that at the reference settings
# (speeds 5, camera 3) per-item times are 1.0 / capture / 1.6 / 1.0 s.
DEFAULT_BASE_TIMES = {"conveyor": 5.0, "arm": 8.0, "laser": 5.0}
DEFAULT_JITTER = {"conveyor": 0.25, "arm": 0.25, "camera": 0.0, "laser": 0.0}
DEFAULT_COMPONENT_RATE = 0.5


@dataclass(frozen=True)
class StationParams:
    station: str
    base_time: float
    speed: int
    jitter_fraction: float = 0.0
    deterministic: bool = True

    def __post_init__(self):
        if self.base_time <= 0:
            raise ValueError("base_time must be positive")
        if self.speed < 1:
            raise ValueError("speed must be >= 1")
        if not 0 <= self.jitter_fraction < 1:
            raise ValueError("jitter_fraction must lie in [0,1)")
        if self.deterministic and self.jitter_fraction != 0:
            raise ValueError("deterministic stations must have zero jitter")


def station_params(scenario: ScenarioConfig) -> dict[str, StationParams]:
    return {
        "conveyor": StationParams(
            "conveyor", DEFAULT_BASE_TIMES["conveyor"], scenario.conveyor_speed,
            DEFAULT_JITTER["conveyor"], deterministic=False,
        ),
        "camera": StationParams(
            "camera", float(scenario.camera_capture_time), 1, 0.0, deterministic=True,
        ),
        "arm": StationParams(
            "arm", DEFAULT_BASE_TIMES["arm"], scenario.arm_speed,
            DEFAULT_JITTER["arm"], deterministic=False,
        ),
        "laser": StationParams(
            "laser", DEFAULT_BASE_TIMES["laser"], scenario.laser_speed, 0.0, deterministic=True,
        ),
    }


def service_time(params: StationParams, rng: np.random.Generator) -> float:
    """One service duration; camera/laser are exact, conveyor/arm jittered."""
    nominal = params.base_time / params.speed
    if params.deterministic or params.jitter_fraction == 0:
        return nominal
    u = rng.uniform(1.0 - params.jitter_fraction, 1.0 + params.jitter_fraction)
    return nominal * u


def inject_error(error_percent: float, rng: np.random.Generator) -> bool:
    """True with probability error_percent/100."""
    if not 0 <= error_percent <= 100:
        raise ValueError("error_percent must lie in [0,100]")
    if error_percent == 0:
        return False
    if error_percent == 100:
        return True
    return rng.random() < error_percent / 100.0


@dataclass
class GarmentRecord:
    garment_id: int
    true_class: MaterialClass
    predicted_class: MaterialClass | None = None
    errors: dict[str, int] = field(default_factory=lambda: {s: 0 for s in PIPELINE_ORDER})
    components_removed: int = 0

    @property
    def error_free(self) -> bool:
        return all(n == 0 for n in self.errors.values())

    def to_dict(self) -> dict:
        return {
            "garment_id": self.garment_id,
            "true_class": self.true_class.label_name,
            "predicted_class": (
                self.predicted_class.label_name if self.predicted_class is not None else None
            ),
            "errors": dict(self.errors),
            "components_removed": self.components_removed,
        }


@dataclass
class RepetitionReport:
    station_times: dict[str, float]
    green_efficiency: float
    garment_records: list[GarmentRecord]

    @property
    def total_time(self) -> float:
        # Exact additivity by construction: the total IS the sum of the parts.
        return (
            self.station_times["conveyor"]
            + self.station_times["arm"]
            + self.station_times["camera"]
            + self.station_times["laser"]
        )

    def to_dict(self) -> dict:
        return {
            "total_time": self.total_time,
            "conveyor_time": self.station_times["conveyor"],
            "arm_time": self.station_times["arm"],
            "camera_time": self.station_times["camera"],
            "laser_time": self.station_times["laser"],
            "green_efficiency": self.green_efficiency,
            "garments": [g.to_dict() for g in self.garment_records],
        }


@dataclass
class RunReport:
    scenario: ScenarioConfig
    repetitions: list[RepetitionReport]

    def summary(self) -> dict:
        n = len(self.repetitions)
        keys = ("total_time", "conveyor_time", "arm_time", "camera_time", "laser_time",
                "green_efficiency")
        dicts = [r.to_dict() for r in self.repetitions]
        return {k: sum(d[k] for d in dicts) / n for k in keys}

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "summary": self.summary(),
            "repetitions": [r.to_dict() for r in self.repetitions],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def garments_csv(self) -> str:
        """Per-garment CSV over all repetitions, matching the documented header."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["garment_id", "true_class", "predicted_class", "errors_conveyor",
             "errors_camera", "errors_arm", "errors_laser", "components_removed"]
        )
        for rep in self.repetitions:
            for g in rep.garment_records:
                w.writerow(
                    [g.garment_id, g.true_class.label_name,
                     g.predicted_class.label_name if g.predicted_class else "",
                     g.errors["conveyor"], g.errors["camera"], g.errors["arm"],
                     g.errors["laser"], g.components_removed]
                )
        return buf.getvalue()


def process_pipeline(
    scenario: ScenarioConfig,
    garments: list[Garment],
    classifier,
    rng: np.random.Generator,
    collect_trace: bool = False,
) -> RepetitionReport | tuple[RepetitionReport, list[SimEvent]]:
    """Run one repetition: every garment traverses conveyor → camera → arm → laser → bin.

    Each station may inject at most one error per garment, costing exactly one
    retry of that station's service. Station aggregates sum every charged
    duration, retries included.
    """
    validate_scenario(scenario)
    params = station_params(scenario)
    station_times = {s: 0.0 for s in PIPELINE_ORDER}
    records = {g.id: GarmentRecord(g.id, g.true_class) for g in garments}
    by_id = {g.id: g for g in garments}
    order = [g.id for g in garments]
    queue = EventQueue()

    def begin_service(gid: int, station: str, queue: EventQueue, retry: bool):
        duration = service_time(params[station], rng)
        station_times[station] += duration
        queue.schedule(queue.clock, "service_start", gid, station, {"retry": retry})
        queue.schedule(
            queue.clock + duration, "service_end", gid, station,
            {"retry": retry, "duration": duration},
        )

    def on_arrival(event: SimEvent, queue: EventQueue):
        begin_service(event.garment_id, "conveyor", queue, retry=False)

    def on_service_end(event: SimEvent, queue: EventQueue):
        gid, station = event.garment_id, event.station
        record = records[gid]
        first_pass = not event.payload.get("retry", False)
        if first_pass and inject_error(scenario.error_percent, rng):
            record.errors[station] += 1
            queue.schedule(queue.clock, "error_injected", gid, station)
            begin_service(gid, station, queue, retry=True)
            return
        if station == "camera":
            result = classifier.classify(by_id[gid], rng)
            record.predicted_class = result.predicted
            queue.schedule(
                queue.clock, "classified", gid, "camera",
                {"predicted": result.predicted.label_name, "scores": list(result.scores)},
            )
        elif station == "laser":
            for tag in by_id[gid].hard_components:
                record.components_removed += 1
                queue.schedule(queue.clock, "component_removed", gid, "laser", {"component": tag})
        next_idx = PIPELINE_ORDER.index(station) + 1
        if next_idx < len(PIPELINE_ORDER):
            begin_service(gid, PIPELINE_ORDER[next_idx], queue, retry=False)
        else:
            queue.schedule(
                queue.clock, "deposited", gid, "bin",
                {"bin": record.predicted_class.label_name},
            )

    def on_deposited(event: SimEvent, queue: EventQueue):
        pos = order.index(event.garment_id)
        if pos + 1 < len(order):
            queue.schedule(queue.clock, "arrival", order[pos + 1], "conveyor")

    handlers = {
        "arrival": on_arrival,
        "service_end": on_service_end,
        "deposited": on_deposited,
    }
    if order:
        queue.schedule(0.0, "arrival", order[0], "conveyor")
    trace = run_to_completion(queue, handlers)

    count = len(garments)
    if count == 0:
        efficiency = 1.0
    else:
        efficiency = sum(1 for r in records.values() if r.error_free) / count
    report = RepetitionReport(
        station_times=station_times,
        green_efficiency=efficiency,
        garment_records=[records[gid] for gid in order],
    )
    if collect_trace:
        return report, trace
    return report


def run_scenario(
    scenario: ScenarioConfig,
    classifier,
    component_rate: float = DEFAULT_COMPONENT_RATE,
) -> RunReport:
    """Execute all repetitions on independent "rep-i" substreams and aggregate."""
    validate_scenario(scenario)
    reps = []
    for i in range(scenario.repetitions):
        rng = derive_stream(scenario.seed, f"rep-{i}")
        garments = generate_garments(
            scenario.garment_count, scenario.class_priors, component_rate, rng
        )
        reps.append(process_pipeline(scenario, garments, classifier, rng))
    return RunReport(scenario=scenario, repetitions=reps)
