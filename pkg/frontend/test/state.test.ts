import { describe, expect, it } from 'vitest';

import {
  ClassPlan,
  InvalidTransition,
  UiSessionState,
  classSpecString,
  initialState,
  planTotal,
  reduce,
  validatePlan,
} from '../src/state';

const PLAN: ClassPlan[] = [
  { name: 'kick', count: 5 },
  { name: 'snare', count: 5 },
  { name: 'hihat', count: 5 },
];

function trainedState(): UiSessionState {
  let s = reduce(initialState(), { type: 'SESSION_CREATED', sessionId: 'abc' });
  s = reduce(s, { type: 'START_ENROLLING', plan: PLAN });
  return reduce(s, {
    type: 'TRAIN_SUCCEEDED',
    summary: { onsetsFound: 15, expected: 15, selectedFeatures: ['mfcc_1'], trainingAccuracy: 1 },
  });
}

describe('state machine', () => {
  it('walks idle -> enrolling -> trained -> performing -> trained', () => {
    let s = initialState();
    expect(s.phase).toBe('idle');
    s = reduce(s, { type: 'START_ENROLLING', plan: PLAN });
    expect(s.phase).toBe('enrolling');
    s = reduce(s, {
      type: 'TRAIN_SUCCEEDED',
      summary: { onsetsFound: 15, expected: 15, selectedFeatures: [], trainingAccuracy: 1 },
    });
    expect(s.phase).toBe('trained');
    s = reduce(s, { type: 'START_PERFORMING' });
    expect(s.phase).toBe('performing');
    s = reduce(s, { type: 'PERFORMANCE_DONE', events: [], duration: 2 });
    expect(s.phase).toBe('trained');
  });

  it('cannot reach performing without trained', () => {
    expect(() => reduce(initialState(), { type: 'START_PERFORMING' }))
      .toThrow(InvalidTransition);
    const enrolling = reduce(initialState(), { type: 'START_ENROLLING', plan: PLAN });
    expect(() => reduce(enrolling, { type: 'START_PERFORMING' }))
      .toThrow(InvalidTransition);
  });

  it('cannot record training results outside enrolling', () => {
    expect(() => reduce(initialState(), {
      type: 'TRAIN_SUCCEEDED',
      summary: { onsetsFound: 1, expected: 1, selectedFeatures: [], trainingAccuracy: 1 },
    })).toThrow(InvalidTransition);
    expect(() => reduce(trainedState(), { type: 'TRAIN_MISMATCH', found: 14, expected: 15 }))
      .toThrow(InvalidTransition);
  });

  it('mismatch keeps the session enrolling and stores found/expected', () => {
    let s = reduce(initialState(), { type: 'START_ENROLLING', plan: PLAN });
    s = reduce(s, { type: 'TRAIN_MISMATCH', found: 14, expected: 15 });
    expect(s.phase).toBe('enrolling');
    expect(s.lastMismatch).toEqual({ found: 14, expected: 15 });
    // A successful retrain clears the mismatch.
    s = reduce(s, {
      type: 'TRAIN_SUCCEEDED',
      summary: { onsetsFound: 15, expected: 15, selectedFeatures: [], trainingAccuracy: 1 },
    });
    expect(s.lastMismatch).toBeNull();
  });

  it('re-enrolling from trained is allowed (retrain path)', () => {
    const s = reduce(trainedState(), { type: 'START_ENROLLING', plan: PLAN });
    expect(s.phase).toBe('enrolling');
  });

  it('live events only arrive while performing', () => {
    const event = { time: 0.5, label: 'kick', velocity: 90 };
    expect(() => reduce(trainedState(), { type: 'EVENT_RECEIVED', event }))
      .toThrow(InvalidTransition);
    let s = reduce(trainedState(), { type: 'START_PERFORMING' });
    s = reduce(s, { type: 'EVENT_RECEIVED', event });
    expect(s.events).toEqual([event]);
  });

  it('reset returns to idle', () => {
    expect(reduce(trainedState(), { type: 'RESET' })).toEqual(initialState());
  });
});

describe('plan helpers', () => {
  it('validates plans', () => {
    expect(() => validatePlan([{ name: 'kick', count: 5 }])).toThrow(/2 classes/);
    expect(() => validatePlan([{ name: 'a', count: 1 }, { name: 'a', count: 1 }]))
      .toThrow(/unique/);
    expect(() => validatePlan([{ name: 'a', count: 0 }, { name: 'b', count: 1 }]))
      .toThrow(/counts/);
  });

  it('computes totals and spec strings', () => {
    expect(planTotal(PLAN)).toBe(15);
    expect(classSpecString(PLAN)).toBe('kick:5,snare:5,hihat:5');
  });
});
