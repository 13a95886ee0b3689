// Live run view state: a pure fold over the SSE event stream.
//
// Every displayed number is accumulated from event payloads (service_end
// carries its exact duration); nothing is re-derived from simulation rules,
// so replaying a recorded stream reproduces the server's report exactly.

import { RunSummary, SimEventPayload, Station } from './types.js';

export interface RepetitionCounters {
    stationTimes: Record<string, number>;
    errorsByStation: Record<string, number>;
    erroredGarments: Set<number>;
    deposited: number;
    componentsRemoved: number;
}

export interface LiveState {
    repetitions: RepetitionCounters[];
    currentRep: number;
    lastSeq: number;
    garmentStations: Map<number, Station>;
    garmentErrored: Set<number>;
}

function emptyCounters(): RepetitionCounters {
    return {
        stationTimes: { conveyor: 0, camera: 0, arm: 0, laser: 0 },
        errorsByStation: { conveyor: 0, camera: 0, arm: 0, laser: 0 },
        erroredGarments: new Set(),
        deposited: 0,
        componentsRemoved: 0,
    };
}

export function initialState(): LiveState {
    return {
        repetitions: [],
        currentRep: -1,
        lastSeq: -1,
        garmentStations: new Map(),
        garmentErrored: new Set(),
    };
}

export function foldEvent(state: LiveState, event: SimEventPayload): LiveState {
    if (event.seq <= state.lastSeq) {
        return state; // duplicate delivery after reconnect
    }
    state.lastSeq = event.seq;
    if (event.repetition !== state.currentRep) {
        state.currentRep = event.repetition;
        state.repetitions.push(emptyCounters());
        state.garmentStations.clear();
        state.garmentErrored.clear();
    }
    const rep = state.repetitions[state.repetitions.length - 1];
    switch (event.kind) {
        case 'arrival':
        case 'service_start':
            state.garmentStations.set(event.garment_id, event.station);
            break;
        case 'service_end':
            rep.stationTimes[event.station] += event.payload['duration'] as number;
            break;
        case 'error_injected':
            rep.errorsByStation[event.station] += 1;
            rep.erroredGarments.add(event.garment_id);
            state.garmentErrored.add(event.garment_id);
            break;
        case 'component_removed':
            rep.componentsRemoved += 1;
            break;
        case 'deposited':
            rep.deposited += 1;
            state.garmentStations.set(event.garment_id, 'bin');
            break;
        default:
            break;
    }
    return state;
}

export function repetitionSummary(rep: RepetitionCounters): RunSummary {
    const t = rep.stationTimes;
    const totalGarments = rep.deposited;
    return {
        conveyor_time: t.conveyor,
        arm_time: t.arm,
        camera_time: t.camera,
        laser_time: t.laser,
        total_time: t.conveyor + t.arm + t.camera + t.laser,
        green_efficiency:
            totalGarments === 0 ? 1 : (totalGarments - rep.erroredGarments.size) / totalGarments,
    };
}

/** Average over completed repetitions, matching the server's summary arithmetic. */
export function finalCounters(state: LiveState): RunSummary | null {
    if (state.repetitions.length === 0) {
        return null;
    }
    const summaries = state.repetitions.map(repetitionSummary);
    const mean = (key: keyof RunSummary) =>
        summaries.reduce((acc, s) => acc + s[key], 0) / summaries.length;
    return {
        total_time: mean('total_time'),
        conveyor_time: mean('conveyor_time'),
        arm_time: mean('arm_time'),
        camera_time: mean('camera_time'),
        laser_time: mean('laser_time'),
        green_efficiency: mean('green_efficiency'),
    };
}
