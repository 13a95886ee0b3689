// Thin client over the control API; SSE subscription reconnects from the
// last seen sequence number so no event is duplicated or lost.

import { RunListRow, RunSession, ScenarioConfig, SimEventPayload } from './types.js';

export class ApiError extends Error {
    constructor(
        public status: number,
        public body: unknown,
    ) {
        super(`API error ${status}`);
    }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
        throw new ApiError(response.status, body);
    }
    return body as T;
}

export function postScenario(cfg: ScenarioConfig): Promise<{ scenario_id: string }> {
    return request('/api/scenarios', {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(cfg),
    });
}

export function startRun(
    scenarioId: string,
    profileName: string,
    pacing: number,
): Promise<{ run_id: string }> {
    return request('/api/runs', {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ scenario_id: scenarioId, profile_name: profileName, pacing }),
    });
}

export function getRun(runId: string): Promise<RunSession> {
    return request(`/api/runs/${runId}`);
}

export function listRuns(): Promise<RunListRow[]> {
    return request('/api/runs');
}

export function pauseRun(runId: string): Promise<RunSession> {
    return request(`/api/runs/${runId}/pause`, { method: 'POST' });
}

export function resumeRun(runId: string): Promise<RunSession> {
    return request(`/api/runs/${runId}/resume`, { method: 'POST' });
}

export interface EventSubscription {
    close(): void;
}

export function subscribeEvents(
    runId: string,
    onEvent: (event: SimEventPayload) => void,
    onSummary: (summary: unknown) => void,
): EventSubscription {
    let lastSeq = -1;
    let source: EventSource | null = null;
    let closed = false;

    const connect = () => {
        const cursor = lastSeq >= 0 ? `?cursor=${lastSeq}` : '';
        source = new EventSource(`/api/runs/${runId}/events${cursor}`);
        source.onmessage = (msg) => {
            const event = JSON.parse(msg.data) as SimEventPayload;
            if (event.seq > lastSeq) {
                lastSeq = event.seq;
                onEvent(event);
            }
        };
        source.addEventListener('summary', (msg) => {
            onSummary(JSON.parse((msg as MessageEvent).data));
            source?.close();
            closed = true;
        });
        source.onerror = () => {
            source?.close();
            if (!closed) {
                setTimeout(connect, 500); // resume from lastSeq cursor
            }
        };
    };
    connect();
    return {
        close() {
            closed = true;
            source?.close();
        },
    };
}
