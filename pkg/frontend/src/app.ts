// Dashboard wiring: scenario editor, live pipeline view, what-if comparison.

import {
    getRun,
    listRuns,
    pauseRun,
    postScenario,
    resumeRun,
    startRun,
    subscribeEvents,
    ApiError,
    EventSubscription,
} from './api.js';
import { knobRows, outcomeRows } from './compare.js';
import { finalCounters, foldEvent, initialState, LiveState } from './liveview.js';
import {
    applyServerViolations,
    newDraft,
    ScenarioDraft,
    SCENARIO_RANGES,
    setField,
} from './scenario.js';
import { RunReportPayload, SimEventPayload, Station } from './types.js';

const LANES: Station[] = ['conveyor', 'camera', 'arm', 'laser', 'bin'];

let draft: ScenarioDraft = newDraft();
let liveState: LiveState = initialState();
let subscription: EventSubscription | null = null;
let currentRunId: string | null = null;
const selectedRuns: string[] = [];

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing element #${id}`);
    }
    return node as T;
}

function banner(text: string, isError = true) {
    const box = el<HTMLDivElement>('banner');
    box.textContent = text;
    box.className = text ? (isError ? 'banner error' : 'banner info') : 'banner hidden';
}

// ---- scenario editor -------------------------------------------------------

function renderEditor() {
    const container = el<HTMLDivElement>('editor-fields');
    container.innerHTML = '';
    for (const [field, range] of Object.entries(SCENARIO_RANGES)) {
        const value = (draft.values as unknown as Record<string, number>)[field];
        const row = document.createElement('div');
        row.className = 'field-row';
        const violation = draft.violations[field];
        row.innerHTML = `
            <label for="f-${field}">${field.replace(/_/g, ' ')}</label>
            <input id="f-${field}" type="range" min="${range.min}" max="${range.max}"
                   step="${range.step}" value="${value}">
            <span class="value">${value}</span>
            ${violation ? `<span class="violation">${violation}</span>` : ''}
        `;
        const input = row.querySelector('input') as HTMLInputElement;
        input.addEventListener('input', () => {
            draft = setField(draft, field, Number(input.value));
            (row.querySelector('.value') as HTMLSpanElement).textContent = String(
                (draft.values as unknown as Record<string, number>)[field],
            );
        });
        container.appendChild(row);
    }
    const seed = el<HTMLInputElement>('seed-input');
    seed.value = String(draft.values.seed);
    seed.onchange = () => {
        draft.values.seed = Math.max(0, Math.floor(Number(seed.value) || 0));
    };
}

async function submitScenarioAndRun() {
    banner('');
    try {
        const { scenario_id } = await postScenario(draft.values);
        const pacing = Number(el<HTMLInputElement>('pacing-input').value) || 10;
        const { run_id } = await startRun(scenario_id, 'ResNest-101', pacing);
        watchRun(run_id);
    } catch (err) {
        if (err instanceof ApiError && err.status === 422) {
            const body = err.body as { violations?: string[] };
            draft = applyServerViolations(draft, body.violations ?? []);
            renderEditor();
        } else {
            banner(`API unreachable or failed: ${err}`);
        }
    }
}

// ---- live run view ---------------------------------------------------------

function renderLanes() {
    const lanes = el<HTMLDivElement>('lanes');
    lanes.innerHTML = '';
    for (const station of LANES) {
        const lane = document.createElement('div');
        lane.className = 'lane';
        lane.id = `lane-${station}`;
        lane.innerHTML = `<h3>${station}</h3><div class="garments"></div>`;
        lanes.appendChild(lane);
    }
    for (const [garmentId, station] of liveState.garmentStations) {
        const holder = document.querySelector(`#lane-${station} .garments`);
        if (holder) {
            const badge = document.createElement('span');
            badge.className = liveState.garmentErrored.has(garmentId)
                ? 'garment errored'
                : 'garment';
            badge.textContent = `#${garmentId}`;
            holder.appendChild(badge);
        }
    }
}

function renderCounters() {
    const summary = finalCounters(liveState);
    const box = el<HTMLDivElement>('counters');
    if (!summary) {
        box.textContent = 'no events yet';
        return;
    }
    box.innerHTML = `
        <span>rep ${liveState.currentRep + 1}</span>
        <span>conveyor ${summary.conveyor_time.toFixed(1)} s</span>
        <span>camera ${summary.camera_time.toFixed(1)} s</span>
        <span>arm ${summary.arm_time.toFixed(1)} s</span>
        <span>laser ${summary.laser_time.toFixed(1)} s</span>
        <span>total ${summary.total_time.toFixed(1)} s</span>
        <span>efficiency ${(summary.green_efficiency * 100).toFixed(1)}%</span>
    `;
}

function watchRun(runId: string) {
    subscription?.close();
    currentRunId = runId;
    liveState = initialState();
    el<HTMLSpanElement>('run-label').textContent = runId;
    subscription = subscribeEvents(
        runId,
        (event: SimEventPayload) => {
            liveState = foldEvent(liveState, event);
            renderLanes();
            renderCounters();
        },
        async () => {
            banner(`run ${runId} finished`, false);
            renderCounters();
            await refreshRunList();
        },
    );
}

async function togglePause(pause: boolean) {
    if (!currentRunId) {
        return;
    }
    try {
        await (pause ? pauseRun(currentRunId) : resumeRun(currentRunId));
    } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
            banner('transition not allowed in current state');
        }
    }
}

// ---- comparison view -------------------------------------------------------

async function refreshRunList() {
    try {
        const rows = await listRuns();
        const tbody = el<HTMLTableSectionElement>('run-rows');
        tbody.innerHTML = '';
        for (const row of rows) {
            const tr = document.createElement('tr');
            const selected = selectedRuns.includes(row.run_id);
            tr.innerHTML = `
                <td><input type="checkbox" ${selected ? 'checked' : ''}></td>
                <td>${row.run_id}</td>
                <td>${row.garment_count}</td>
                <td>${row.total_time?.toFixed(1) ?? '-'}</td>
                <td>${row.green_efficiency != null ? (row.green_efficiency * 100).toFixed(1) + '%' : '-'}</td>
                <td><button class="clone">clone &amp; tweak</button></td>
            `;
            (tr.querySelector('input') as HTMLInputElement).addEventListener('change', (ev) => {
                const checked = (ev.target as HTMLInputElement).checked;
                const idx = selectedRuns.indexOf(row.run_id);
                if (checked && idx < 0) {
                    selectedRuns.push(row.run_id);
                } else if (!checked && idx >= 0) {
                    selectedRuns.splice(idx, 1);
                }
                renderComparison();
            });
            (tr.querySelector('.clone') as HTMLButtonElement).addEventListener('click', async () => {
                const session = await getRun(row.run_id);
                if (session.report) {
                    draft = newDraft(session.report.scenario);
                    renderEditor();
                    banner(`editor pre-filled from ${row.run_id}`, false);
                }
            });
            tbody.appendChild(tr);
        }
    } catch (err) {
        banner(`cannot list runs: ${err}`);
    }
}

async function renderComparison() {
    const reports: RunReportPayload[] = [];
    for (const runId of selectedRuns) {
        const session = await getRun(runId);
        if (session.report) {
            reports.push(session.report);
        }
    }
    const table = el<HTMLTableElement>('compare-table');
    if (reports.length === 0) {
        table.innerHTML = '';
        return;
    }
    const rows = [...knobRows(reports), ...outcomeRows(reports)];
    const header = `<tr><th>field</th>${selectedRuns.map((r) => `<th>${r}</th>`).join('')}${
        reports.length === 2 ? '<th>delta</th>' : ''
    }</tr>`;
    table.innerHTML =
        header +
        rows
            .map(
                (row) =>
                    `<tr><td>${row.label}</td>${row.values
                        .map((v) => `<td>${Number.isInteger(v) ? v : v.toFixed(1)}</td>`)
                        .join('')}${
                        row.delta != null
                            ? `<td>${row.delta >= 0 ? '+' : ''}${
                                  Number.isInteger(row.delta) ? row.delta : row.delta.toFixed(1)
                              }</td>`
                            : ''
                    }</tr>`,
            )
            .join('');
}

export function init() {
    renderEditor();
    renderLanes();
    el<HTMLButtonElement>('run-button').addEventListener('click', submitScenarioAndRun);
    el<HTMLButtonElement>('pause-button').addEventListener('click', () => togglePause(true));
    el<HTMLButtonElement>('resume-button').addEventListener('click', () => togglePause(false));
    el<HTMLButtonElement>('refresh-runs').addEventListener('click', refreshRunList);
    refreshRunList().catch(() => banner('API unreachable; retry with the refresh button'));
}

if (typeof document !== 'undefined' && document.readyState !== 'loading') {
    init();
} else if (typeof document !== 'undefined') {
    document.addEventListener('DOMContentLoaded', init);
}
