import { readFileSync } from 'node:fs';
import { describe, expect, it } from 'vitest';

import { knobRows, outcomeRows } from '../src/compare.js';
import { RunReportPayload } from '../src/types.js';

function loadReport(name: string): RunReportPayload {
    const fixture = JSON.parse(
        readFileSync(new URL(`./fixtures/${name}`, import.meta.url), 'utf-8'),
    );
    return fixture.report;
}

const n10 = loadReport('run_n10.json');
const n14 = loadReport('run_n14.json');

describe('outcomeRows', () => {
    it('camera column shows the 30-vs-42 family delta for n=10 vs n=14', () => {
        const camera = outcomeRows([n10, n14]).find((r) => r.label.startsWith('Camera'))!;
        expect(camera.values[0]).toBeGreaterThanOrEqual(30);
        expect(camera.values[1]).toBeGreaterThanOrEqual(42);
        expect(camera.delta).toBeCloseTo(camera.values[1] - camera.values[0], 12);
    });

    it('camera column is exactly 30 vs 42 when no errors are injected', () => {
        const a = loadReport('run_n10_noerror.json');
        const b = loadReport('run_n14_noerror.json');
        const camera = outcomeRows([a, b]).find((r) => r.label.startsWith('Camera'))!;
        expect(camera.values).toEqual([30, 42]);
        expect(camera.delta).toBe(12);
    });

    it('comparing a run with itself gives all-zero deltas', () => {
        for (const row of outcomeRows([n10, n10])) {
            expect(row.delta).toBe(0);
        }
        for (const row of knobRows([n10, n10])) {
            expect(row.delta).toBe(0);
        }
    });

    it('single selection has no delta column', () => {
        for (const row of outcomeRows([n10])) {
            expect(row.delta).toBeNull();
        }
    });

    it('efficiency is rendered in percent', () => {
        const eff = outcomeRows([n10]).find((r) => r.label.startsWith('Efficiency'))!;
        expect(eff.values[0]).toBe(n10.summary.green_efficiency * 100);
    });
});

describe('knobRows', () => {
    it('garment count knob differs by 4 between the two runs', () => {
        const knob = knobRows([n10, n14]).find((r) => r.label === 'garment_count')!;
        expect(knob.values).toEqual([10, 14]);
        expect(knob.delta).toBe(4);
    });
});
