// Enrolment wizard: one recorded take per class, concatenated
// client-side in plan order so the service's positional labeling is
// guaranteed to line up with the declared class spec.

import { ClassPlan, planTotal } from './state.js';
import { SERVICE_SAMPLE_RATE } from './audio.js';

const TAKE_GAP_SECONDS = 0.4;

export class EnrolmentWizard {
  readonly plan: ClassPlan[];
  private takes: Map<string, Float32Array>;

  constructor(plan: ClassPlan[]) {
    this.plan = plan;
    this.takes = new Map();
  }

  recordTake(className: string, samples: Float32Array): void {
    if (!this.plan.some((c) => c.name === className)) {
      throw new Error(`class ${className} is not in the plan`);
    }
    this.takes.set(className, samples);
  }

  hasTake(className: string): boolean {
    return this.takes.has(className);
  }

  clearTake(className: string): void {
    this.takes.delete(className);
  }

  isComplete(): boolean {
    return this.plan.every((c) => this.takes.has(c.name));
  }

  /** Takes joined in plan order with a short silence gap between them. */
  concatenated(sampleRate: number = SERVICE_SAMPLE_RATE): Float32Array {
    if (!this.isComplete()) throw new Error('record every class before training');
    const gap = Math.round(TAKE_GAP_SECONDS * sampleRate);
    let total = gap;
    for (const c of this.plan) total += this.takes.get(c.name)!.length + gap;
    const out = new Float32Array(total);
    let offset = gap;
    for (const c of this.plan) {
      const take = this.takes.get(c.name)!;
      out.set(take, offset);
      offset += take.length + gap;
    }
    return out;
  }

  /** Retry prompt for a 409: "14 of 15 sounds detected ...". */
  mismatchMessage(found: number, expected: number): string {
    return `${found} of ${expected} sounds detected. ` +
      `Re-record with clearly separated hits, then train again.`;
  }

  expectedTotal(): number {
    return planTotal(this.plan);
  }
}
