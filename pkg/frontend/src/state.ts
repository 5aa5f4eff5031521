// UI session state machine. The only legal path is
// idle -> enrolling -> trained -> performing (-> trained), never skipping
// trained; a training mismatch keeps the session in enrolling.

export type Phase = 'idle' | 'enrolling' | 'trained' | 'performing';

export type ClassPlan = { name: string; count: number };

export type TrainingSummary = {
  onsetsFound: number;
  expected: number;
  selectedFeatures: string[];
  trainingAccuracy: number;
};

export type UiEvent = { time: number; label: string; velocity: number };

export type UiSessionState = {
  phase: Phase;
  sessionId: string | null;
  plan: ClassPlan[];
  lastTraining: TrainingSummary | null;
  lastMismatch: { found: number; expected: number } | null;
  events: UiEvent[];
  duration: number;
};

export type UiAction =
  | { type: 'SESSION_CREATED'; sessionId: string }
  | { type: 'START_ENROLLING'; plan: ClassPlan[] }
  | { type: 'TRAIN_SUCCEEDED'; summary: TrainingSummary }
  | { type: 'TRAIN_MISMATCH'; found: number; expected: number }
  | { type: 'START_PERFORMING' }
  | { type: 'EVENT_RECEIVED'; event: UiEvent }
  | { type: 'PERFORMANCE_DONE'; events: UiEvent[]; duration: number }
  | { type: 'RESET' };

export class InvalidTransition extends Error {
  constructor(state: UiSessionState, action: UiAction) {
    super(`illegal ${action.type} in phase ${state.phase}`);
  }
}

export function initialState(): UiSessionState {
  return {
    phase: 'idle',
    sessionId: null,
    plan: [],
    lastTraining: null,
    lastMismatch: null,
    events: [],
    duration: 0,
  };
}

export function validatePlan(plan: ClassPlan[]): void {
  if (plan.length < 2) throw new Error('plan needs at least 2 classes');
  const names = plan.map((c) => c.name);
  if (new Set(names).size !== names.length) throw new Error('class names must be unique');
  if (plan.some((c) => c.count < 1)) throw new Error('exemplar counts must be >= 1');
}

export function planTotal(plan: ClassPlan[]): number {
  return plan.reduce((total, c) => total + c.count, 0);
}

export function classSpecString(plan: ClassPlan[]): string {
  return plan.map((c) => `${c.name}:${c.count}`).join(',');
}

export function reduce(state: UiSessionState, action: UiAction): UiSessionState {
  switch (action.type) {
    case 'SESSION_CREATED':
      return { ...state, sessionId: action.sessionId };
    case 'START_ENROLLING':
      if (state.phase !== 'idle' && state.phase !== 'trained') {
        throw new InvalidTransition(state, action);
      }
      validatePlan(action.plan);
      return { ...state, phase: 'enrolling', plan: action.plan, lastMismatch: null };
    case 'TRAIN_SUCCEEDED':
      if (state.phase !== 'enrolling') throw new InvalidTransition(state, action);
      return {
        ...state,
        phase: 'trained',
        lastTraining: action.summary,
        lastMismatch: null,
        events: [],
        duration: 0,
      };
    case 'TRAIN_MISMATCH':
      if (state.phase !== 'enrolling') throw new InvalidTransition(state, action);
      return { ...state, lastMismatch: { found: action.found, expected: action.expected } };
    case 'START_PERFORMING':
      if (state.phase !== 'trained') throw new InvalidTransition(state, action);
      return { ...state, phase: 'performing', events: [], duration: 0 };
    case 'EVENT_RECEIVED':
      if (state.phase !== 'performing') throw new InvalidTransition(state, action);
      return { ...state, events: [...state.events, action.event] };
    case 'PERFORMANCE_DONE':
      if (state.phase !== 'performing') throw new InvalidTransition(state, action);
      return { ...state, phase: 'trained', events: action.events, duration: action.duration };
    case 'RESET':
      return initialState();
  }
}
