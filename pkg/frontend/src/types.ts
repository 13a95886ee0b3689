// Wire types mirroring the control API's JSON payloads.

export interface ScenarioConfig {
    conveyor_speed: number;
    arm_speed: number;
    camera_capture_time: number;
    laser_speed: number;
    error_percent: number;
    garment_count: number;
    class_priors: number[];
    repetitions: number;
    seed: number;
}

export type EventKind =
    | 'arrival'
    | 'service_start'
    | 'service_end'
    | 'error_injected'
    | 'classified'
    | 'component_removed'
    | 'deposited';

export type Station = 'conveyor' | 'camera' | 'arm' | 'laser' | 'bin';

export interface SimEventPayload {
    seq: number;
    repetition: number;
    time: number;
    kind: EventKind;
    garment_id: number;
    station: Station;
    payload: Record<string, unknown>;
}

export interface RunSummary {
    total_time: number;
    conveyor_time: number;
    arm_time: number;
    camera_time: number;
    laser_time: number;
    green_efficiency: number;
}

export interface RunReportPayload {
    scenario: ScenarioConfig;
    summary: RunSummary;
    repetitions: unknown[];
}

export interface RunListRow {
    run_id: string;
    created_at: string;
    profile_name: string;
    garment_count: number;
    total_time: number | null;
    green_efficiency: number | null;
}

export interface RunSession {
    run_id: string;
    state: 'pending' | 'running' | 'paused' | 'completed' | 'failed';
    progress: { deposited: number; total: number };
    pacing: number;
    report?: RunReportPayload;
}
