// Scenario editing: field ranges and client-side clamping before submission.

import { ScenarioConfig } from './types.js';

export interface FieldRange {
    min: number;
    max: number;
    step: number;
}

export const SCENARIO_RANGES: Record<string, FieldRange> = {
    conveyor_speed: { min: 1, max: 5, step: 1 },
    arm_speed: { min: 1, max: 5, step: 1 },
    camera_capture_time: { min: 3, max: 8, step: 1 },
    laser_speed: { min: 1, max: 5, step: 1 },
    error_percent: { min: 0, max: 100, step: 1 },
    garment_count: { min: 0, max: 10000, step: 1 },
    repetitions: { min: 1, max: 100, step: 1 },
};

export function clampField(field: string, value: number): number {
    const range = SCENARIO_RANGES[field];
    if (!range) {
        return value;
    }
    if (Number.isNaN(value)) {
        return range.min;
    }
    const snapped = range.step === 1 ? Math.round(value) : value;
    return Math.min(range.max, Math.max(range.min, snapped));
}

export function defaultScenario(): ScenarioConfig {
    return {
        conveyor_speed: 5,
        arm_speed: 5,
        camera_capture_time: 3,
        laser_speed: 5,
        error_percent: 8,
        garment_count: 10,
        class_priors: [0.2, 0.2, 0.2, 0.2, 0.2],
        repetitions: 10,
        seed: 0,
    };
}

export interface ScenarioDraft {
    values: ScenarioConfig;
    violations: Record<string, string>;
}

export function newDraft(base?: ScenarioConfig): ScenarioDraft {
    return { values: base ? { ...base } : defaultScenario(), violations: {} };
}

export function setField(draft: ScenarioDraft, field: string, raw: number): ScenarioDraft {
    const values = { ...draft.values, [field]: clampField(field, raw) };
    return { values, violations: draft.violations };
}

/** Fold server-side 422 violation strings ("field: ...") back onto fields. */
export function applyServerViolations(draft: ScenarioDraft, violations: string[]): ScenarioDraft {
    const byField: Record<string, string> = {};
    for (const v of violations) {
        const colon = v.indexOf(':');
        if (colon > 0) {
            byField[v.slice(0, colon)] = v.slice(colon + 1).trim();
        }
    }
    return { values: draft.values, violations: byField };
}
