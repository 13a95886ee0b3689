// What-if comparison: outcome columns and deltas between stored runs.

import { RunReportPayload, RunSummary } from './types.js';

export interface ComparisonRow {
    label: string;
    values: number[];
    delta: number | null; // second minus first, when exactly two runs selected
}

const OUTCOME_FIELDS: Array<{ label: string; key: keyof RunSummary }> = [
    { label: 'Total time (s)', key: 'total_time' },
    { label: 'Conveyor time (s)', key: 'conveyor_time' },
    { label: 'Arm time (s)', key: 'arm_time' },
    { label: 'Camera time (s)', key: 'camera_time' },
    { label: 'Laser time (s)', key: 'laser_time' },
    { label: 'Efficiency (%)', key: 'green_efficiency' },
];

const KNOB_FIELDS = [
    'conveyor_speed',
    'arm_speed',
    'camera_capture_time',
    'laser_speed',
    'error_percent',
    'garment_count',
    'repetitions',
    'seed',
] as const;

export function outcomeRows(reports: RunReportPayload[]): ComparisonRow[] {
    return OUTCOME_FIELDS.map(({ label, key }) => {
        const scale = key === 'green_efficiency' ? 100 : 1;
        const values = reports.map((r) => r.summary[key] * scale);
        const delta = values.length === 2 ? values[1] - values[0] : null;
        return { label, values, delta };
    });
}

export function knobRows(reports: RunReportPayload[]): ComparisonRow[] {
    return KNOB_FIELDS.map((key) => {
        const values = reports.map((r) => r.scenario[key]);
        const delta = values.length === 2 ? values[1] - values[0] : null;
        return { label: key, values, delta };
    });
}
