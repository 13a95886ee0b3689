import numpy as np
import pytest

import loomline.stations as stations
from loomline.classify import StochasticClassifier, profile_by_name
from loomline.domain import MaterialClass, ScenarioConfig, generate_garments
from loomline.kernel import derive_stream, serialize_trace
from loomline.stations import (
    StationParams,
    inject_error,
    process_pipeline,
    run_scenario,
    service_time,
    station_params,
)


@pytest.fixture
def resnest():
    return StochasticClassifier(profile_by_name("ResNest-101"))


@pytest.fixture
def zero_jitter(monkeypatch):
    monkeypatch.setattr(stations, "DEFAULT_JITTER", {s: 0.0 for s in stations.DEFAULT_JITTER})


def make_garments(scenario, label="g", component_rate=0.5):
    rng = derive_stream(scenario.seed, label)
    return generate_garments(
        scenario.garment_count, scenario.class_priors, component_rate, rng
    ), rng


class TestServiceTime:
    def test_camera_returns_capture_time_exactly(self):
        params = station_params(ScenarioConfig(camera_capture_time=3))["camera"]
        rng = derive_stream(0, "t")
        assert all(service_time(params, rng) == 3.0 for _ in range(10))

    def test_laser_scales_with_speed(self):
        params = StationParams("laser", 5.0, 5, 0.0, deterministic=True)
        rng = derive_stream(0, "t")
        assert service_time(params, rng) == 1.0

    def test_conveyor_zero_jitter_exact(self):
        params = StationParams("conveyor", 5.0, 5, 0.0, deterministic=False)
        rng = derive_stream(0, "t")
        assert service_time(params, rng) == 1.0

    def test_jitter_bounds(self):
        params = StationParams("arm", 8.0, 5, 0.25, deterministic=False)
        rng = derive_stream(0, "t")
        nominal = 8.0 / 5
        draws = [service_time(params, rng) for _ in range(1000)]
        assert all(0.75 * nominal <= d <= 1.25 * nominal for d in draws)

    def test_deterministic_with_jitter_rejected(self):
        with pytest.raises(ValueError, match="zero jitter"):
            StationParams("camera", 3.0, 1, 0.1, deterministic=True)


class TestInjectError:
    def test_zero_never(self):
        rng = derive_stream(0, "e")
        assert not any(inject_error(0.0, rng) for _ in range(1000))

    def test_hundred_always(self):
        rng = derive_stream(0, "e")
        assert all(inject_error(100.0, rng) for _ in range(1000))

    def test_eight_percent_frequency(self):
        rng = derive_stream(11, "e")
        rate = sum(inject_error(8.0, rng) for _ in range(100000)) / 100000
        assert abs(rate - 0.08) < 0.003


class TestProcessPipeline:
    def test_empty_run(self, resnest):
        scenario = ScenarioConfig(garment_count=0)
        report = process_pipeline(scenario, [], resnest, derive_stream(0, "r"))
        assert report.total_time == 0.0
        assert report.green_efficiency == 1.0

    def test_closed_form_zero_error_zero_jitter(self, resnest, zero_jitter):
        scenario = ScenarioConfig(garment_count=12, error_percent=0, seed=4)
        garments, rng = make_garments(scenario)
        report = process_pipeline(scenario, garments, resnest, rng)
        assert report.station_times["conveyor"] == pytest.approx(12.0, abs=1e-12)
        assert report.station_times["arm"] == pytest.approx(19.2, abs=1e-12)
        assert report.station_times["camera"] == 36.0
        assert report.station_times["laser"] == 12.0
        assert report.total_time == pytest.approx(79.2, abs=1e-12)

    def test_additivity_exact(self, resnest):
        scenario = ScenarioConfig(garment_count=14, seed=2)
        garments, rng = make_garments(scenario)
        report = process_pipeline(scenario, garments, resnest, rng)
        t = report.station_times
        parts = t["conveyor"] + t["arm"] + t["camera"] + t["laser"]
        assert report.total_time - parts == 0.0

    def test_camera_aggregate_identity_with_errors(self, resnest):
        scenario = ScenarioConfig(garment_count=50, error_percent=8, seed=9)
        garments, rng = make_garments(scenario)
        report = process_pipeline(scenario, garments, resnest, rng)
        camera_errors = sum(g.errors["camera"] for g in report.garment_records)
        assert report.station_times["camera"] == (50 + camera_errors) * 3.0

    def test_laser_aggregate_zero_errors(self, resnest):
        scenario = ScenarioConfig(garment_count=14, error_percent=0, seed=3)
        garments, rng = make_garments(scenario)
        report = process_pipeline(scenario, garments, resnest, rng)
        assert report.station_times["laser"] == 14.0

    def test_topology_order_and_component_events(self, resnest):
        scenario = ScenarioConfig(garment_count=5, error_percent=0, seed=8)
        garments, rng = make_garments(scenario, component_rate=1.0)
        report, trace = process_pipeline(scenario, garments, resnest, rng, collect_trace=True)
        order = ["conveyor", "camera", "arm", "laser"]
        for g in garments:
            visits = [e.station for e in trace if e.kind == "service_start"
                      and e.garment_id == g.id and not e.payload.get("retry")]
            assert visits == order
            removed = [e for e in trace if e.kind == "component_removed" and e.garment_id == g.id]
            assert len(removed) == len(g.hard_components) == 2
        assert all(g.components_removed == 2 for g in report.garment_records)

    def test_each_service_start_has_matching_end(self, resnest):
        scenario = ScenarioConfig(garment_count=8, error_percent=30, seed=6)
        garments, rng = make_garments(scenario)
        _, trace = process_pipeline(scenario, garments, resnest, rng, collect_trace=True)
        starts = [(e.garment_id, e.station, e.payload["retry"]) for e in trace
                  if e.kind == "service_start"]
        ends = [(e.garment_id, e.station, e.payload["retry"]) for e in trace
                if e.kind == "service_end"]
        assert sorted(starts) == sorted(ends)

    def test_trace_times_nondecreasing_and_deterministic(self, resnest):
        scenario = ScenarioConfig(garment_count=10, seed=5)

        def trace_text():
            garments, rng = make_garments(scenario)
            _, trace = process_pipeline(scenario, garments, resnest, rng, collect_trace=True)
            return serialize_trace(trace), trace

        text_a, trace = trace_text()
        text_b, _ = trace_text()
        assert text_a == text_b
        times = [e.time for e in trace]
        assert times == sorted(times)

    def test_speed_doubling_halves_aggregate(self, resnest, zero_jitter):
        def conveyor_time(speed):
            scenario = ScenarioConfig(
                conveyor_speed=speed, garment_count=10, error_percent=0, seed=1
            )
            garments, rng = make_garments(scenario)
            return process_pipeline(scenario, garments, resnest, rng).station_times["conveyor"]

        assert conveyor_time(1) == pytest.approx(2 * conveyor_time(2), abs=1e-12)
        assert conveyor_time(2) == pytest.approx(2 * conveyor_time(4), abs=1e-12)

    def test_arm_routes_by_predicted_class(self, resnest):
        scenario = ScenarioConfig(garment_count=6, error_percent=0, seed=12)
        garments, rng = make_garments(scenario)
        report, trace = process_pipeline(scenario, garments, resnest, rng, collect_trace=True)
        deposits = {e.garment_id: e.payload["bin"] for e in trace if e.kind == "deposited"}
        for g in report.garment_records:
            assert deposits[g.garment_id] == g.predicted_class.label_name


class TestRunScenario:
    def test_single_repetition_summary_is_identity(self, resnest):
        scenario = ScenarioConfig(garment_count=5, repetitions=1, seed=20)
        report = run_scenario(scenario, resnest)
        summary = report.summary()
        rep = report.repetitions[0].to_dict()
        for key in ("total_time", "conveyor_time", "green_efficiency"):
            assert summary[key] == rep[key]

    def test_deterministic_across_invocations(self, resnest):
        scenario = ScenarioConfig(garment_count=10, repetitions=10, seed=77)
        a = run_scenario(scenario, resnest).to_json()
        b = run_scenario(scenario, resnest).to_json()
        assert a == b

    def test_reference_camera_aggregate_n12(self, resnest):
        scenario = ScenarioConfig(garment_count=12, error_percent=0, repetitions=10, seed=1)
        assert run_scenario(scenario, resnest).summary()["camera_time"] == 36.0

    def test_summary_is_mean_of_repetitions(self, resnest):
        scenario = ScenarioConfig(garment_count=6, repetitions=4, seed=31)
        report = run_scenario(scenario, resnest)
        total_times = [r.total_time for r in report.repetitions]
        assert report.summary()["total_time"] == pytest.approx(np.mean(total_times), abs=1e-12)

    def test_garments_csv_header(self, resnest):
        scenario = ScenarioConfig(garment_count=2, repetitions=1, seed=0)
        csv_text = run_scenario(scenario, resnest).garments_csv()
        assert csv_text.splitlines()[0] == (
            "garment_id,true_class,predicted_class,errors_conveyor,"
            "errors_camera,errors_arm,errors_laser,components_removed"
        )
        assert len(csv_text.splitlines()) == 3

    def test_green_efficiency_converges(self, resnest):
        scenario = ScenarioConfig(
            garment_count=20000, repetitions=1, error_percent=8, seed=13
        )
        eff = run_scenario(scenario, resnest).summary()["green_efficiency"]
        assert abs(eff - (1 - 0.08) ** 4) < 0.015
