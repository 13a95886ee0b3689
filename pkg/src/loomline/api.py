"""HTTP control plane and live event stream for the digital twin."""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .classify import StochasticClassifier, default_profiles, profile_by_name
from .domain import ScenarioConfig, ScenarioError
from .stations import run_scenario, process_pipeline
from .kernel import derive_stream
from .domain import generate_garments
from .stations import DEFAULT_COMPONENT_RATE
from .store import RunStore, RunNotFoundError, now_utc, RunRecord

LEGAL_TRANSITIONS = {
    ("pending", "running"),
    ("running", "paused"),
    ("paused", "running"),
    ("running", "completed"),
    ("running", "failed"),
}


@dataclass
class RunSession:
    run_id: str
    scenario: ScenarioConfig
    profile_name: str
    pacing: float
    state: str = "pending"
    deposited: int = 0
    report: dict | None = None
    error: str | None = None
    events: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    resume_flag: threading.Event = field(default_factory=threading.Event)

    def transition(self, new_state: str) -> bool:
        with self.lock:
            if (self.state, new_state) not in LEGAL_TRANSITIONS:
                return False
            self.state = new_state
            return True

    def to_dict(self) -> dict:
        total = self.scenario.garment_count * self.scenario.repetitions
        return {
            "run_id": self.run_id,
            "state": self.state,
            "progress": {"deposited": self.deposited, "total": total},
            "pacing": self.pacing,
            "profile_name": self.profile_name,
        }


def _run_worker(session: RunSession, store: RunStore):
    if not session.transition("running"):
        return
    session.resume_flag.set()
    scenario = session.scenario
    try:
        classifier = StochasticClassifier(profile_by_name(session.profile_name))
        report = run_scenario(scenario, classifier)
        # Replay the traces for streaming; same substreams, so the replayed
        # events match the report exactly.
        seq = 0
        for i in range(scenario.repetitions):
            rng = derive_stream(scenario.seed, f"rep-{i}")
            garments = generate_garments(
                scenario.garment_count, scenario.class_priors, DEFAULT_COMPONENT_RATE, rng
            )
            _, trace = process_pipeline(scenario, garments, classifier, rng, collect_trace=True)
            prev_time = 0.0
            for event in trace:
                session.resume_flag.wait()
                if session.pacing > 0 and event.time > prev_time:
                    time.sleep(min((event.time - prev_time) / session.pacing, 1.0))
                prev_time = event.time
                payload = {
                    "seq": seq,
                    "repetition": i,
                    "time": round(event.time, 3),
                    "kind": event.kind,
                    "garment_id": event.garment_id,
                    "station": event.station,
                    "payload": event.payload,
                }
                with session.lock:
                    session.events.append(payload)
                    if event.kind == "deposited":
                        session.deposited += 1
                seq += 1
        report_dict = report.to_dict()
        record = RunRecord(
            run_id=session.run_id,
            created_at=now_utc(),
            scenario=scenario,
            report=report_dict,
            profile_name=session.profile_name,
        )
        store.save_run(record)
        with session.lock:
            session.report = report_dict
        session.transition("completed")
    except Exception as exc:  # noqa: BLE001 - session must record any failure
        session.error = str(exc)
        session.resume_flag.set()
        session.transition("failed")


def create_app(store: RunStore) -> FastAPI:
    app = FastAPI(title="loomline")
    scenarios: dict[str, ScenarioConfig] = {}
    sessions: dict[str, RunSession] = {}

    async def _json_body(request: Request) -> dict | JSONResponse:
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return JSONResponse({"error": "malformed JSON"}, status_code=400)
        if not isinstance(body, dict):
            return JSONResponse({"error": "body must be a JSON object"}, status_code=400)
        return body

    @app.post("/api/scenarios")
    async def post_scenario(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        try:
            cfg = ScenarioConfig.from_dict(body)
        except ScenarioError as exc:
            return JSONResponse({"violations": exc.violations}, status_code=422)
        scenario_id = uuid.uuid4().hex[:12]
        scenarios[scenario_id] = cfg
        return JSONResponse(
            {"scenario_id": scenario_id, "scenario": cfg.to_dict()}, status_code=201
        )

    @app.post("/api/runs")
    async def post_run(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        scenario_id = body.get("scenario_id")
        if scenario_id not in scenarios:
            return JSONResponse({"error": "unknown scenario_id"}, status_code=422)
        profile_name = body.get("profile_name", "ResNest-101")
        try:
            profile_by_name(profile_name)
        except KeyError:
            return JSONResponse({"error": f"unknown profile {profile_name}"}, status_code=422)
        pacing = float(body.get("pacing", 0))
        if pacing < 0:
            return JSONResponse({"error": "pacing must be >= 0"}, status_code=422)
        run_id = f"run-{len(sessions):06d}-{uuid.uuid4().hex[:6]}"
        session = RunSession(run_id, scenarios[scenario_id], profile_name, pacing)
        sessions[run_id] = session
        threading.Thread(target=_run_worker, args=(session, store), daemon=True).start()
        return JSONResponse({"run_id": run_id}, status_code=202)

    @app.get("/api/runs")
    async def list_runs():
        return store.list_runs()

    @app.get("/api/runs/{run_id}")
    async def get_run(run_id: str):
        session = sessions.get(run_id)
        if session is not None:
            out = session.to_dict()
            if session.report is not None:
                out["report"] = session.report
            if session.error is not None:
                out["error"] = session.error
            return out
        try:
            record = store.load_run(run_id)
        except RunNotFoundError:
            return JSONResponse({"error": "unknown run"}, status_code=404)
        return {"run_id": run_id, "state": "completed", "report": record.report}

    @app.post("/api/runs/{run_id}/pause")
    async def pause_run(run_id: str):
        session = sessions.get(run_id)
        if session is None:
            return JSONResponse({"error": "unknown run"}, status_code=404)
        if not session.transition("paused"):
            return JSONResponse({"error": f"cannot pause from {session.state}"}, status_code=409)
        session.resume_flag.clear()
        return session.to_dict()

    @app.post("/api/runs/{run_id}/resume")
    async def resume_run(run_id: str):
        session = sessions.get(run_id)
        if session is None:
            return JSONResponse({"error": "unknown run"}, status_code=404)
        if not session.transition("running"):
            return JSONResponse({"error": f"cannot resume from {session.state}"}, status_code=409)
        session.resume_flag.set()
        return session.to_dict()

    @app.get("/api/runs/{run_id}/events")
    async def run_events(run_id: str, request: Request, cursor: int = -1):
        session = sessions.get(run_id)
        if session is None:
            return JSONResponse({"error": "unknown run"}, status_code=404)
        last_id = request.headers.get("Last-Event-ID")
        start = cursor + 1 if cursor >= 0 else (int(last_id) + 1 if last_id else 0)

        def generate():
            next_idx = start
            while True:
                with session.lock:
                    pending = session.events[next_idx:]
                    state = session.state
                    report = session.report
                for event in pending:
                    yield f"id: {event['seq']}\ndata: {json.dumps(event, sort_keys=True)}\n\n"
                next_idx += len(pending)
                if state in ("completed", "failed"):
                    with session.lock:
                        if next_idx >= len(session.events):
                            break
                    continue
                time.sleep(0.02)
            summary = {
                "state": state,
                "summary": (report or {}).get("summary"),
                "error": session.error,
            }
            yield f"event: summary\ndata: {json.dumps(summary, sort_keys=True)}\n\n"

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.get("/api/profiles")
    async def get_profiles():
        return [p.to_dict() for p in default_profiles()]

    return app
