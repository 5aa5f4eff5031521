// DOM wiring for the studio page: enrolment wizard on the left,
// performance controls and piano roll on the right. All decisions come
// from the state machine; all data comes from the service.

import { SERVICE_SAMPLE_RATE, encodeWavPcm16 } from './audio.js';
import { playTranscription } from './audition.js';
import { MicCapture } from './capture.js';
import { VoxdrumClient } from './client.js';
import { pianoRollLayout, renderPianoRollSvg } from './pianoRoll.js';
import {
  ClassPlan,
  UiSessionState,
  classSpecString,
  initialState,
  reduce,
} from './state.js';
import { EnrolmentWizard } from './wizard.js';

const DEFAULT_PLAN: ClassPlan[] = [
  { name: 'kick', count: 5 },
  { name: 'snare', count: 5 },
  { name: 'hihat', count: 5 },
];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export class StudioApp {
  state: UiSessionState = initialState();
  client: VoxdrumClient;
  wizard: EnrolmentWizard = new EnrolmentWizard(DEFAULT_PLAN);
  capture = new MicCapture();
  liveMode = false;

  constructor(baseUrl: string = '') {
    this.client = new VoxdrumClient(baseUrl || window.location.origin);
  }

  dispatch(action: Parameters<typeof reduce>[1]): void {
    this.state = reduce(this.state, action);
    this.render();
  }

  async init(): Promise<void> {
    const sessionId = await this.client.createSession();
    this.dispatch({ type: 'SESSION_CREATED', sessionId });
    this.dispatch({ type: 'START_ENROLLING', plan: DEFAULT_PLAN });

    el<HTMLButtonElement>('train').onclick = () => void this.train();
    el<HTMLButtonElement>('record-performance').onclick = () => void this.performOffline();
    el<HTMLButtonElement>('record-live').onclick = () => void this.performLive();
    el<HTMLButtonElement>('audition').onclick = () => playTranscription(this.state.events);
    el<HTMLAnchorElement>('export').onclick = (event) => {
      if (!this.state.events.length) event.preventDefault();
    };
    this.render();
  }

  async toggleTake(className: string, button: HTMLButtonElement): Promise<void> {
    if (!this.capture.active) {
      await this.capture.start();
      button.textContent = `stop (${className})`;
      return;
    }
    const pcm = await this.capture.stop();
    const floats = new Float32Array(pcm.length);
    for (let i = 0; i < pcm.length; i++) floats[i] = pcm[i] / 32768;
    this.wizard.recordTake(className, floats);
    button.textContent = `re-record ${className}`;
    this.render();
  }

  async train(): Promise<void> {
    const samples = this.wizard.concatenated();
    const wav = encodeWavPcm16(
      new Int16Array(samples.map((s) => Math.max(-32768, Math.min(32767, Math.round(s * 32768))))),
      SERVICE_SAMPLE_RATE);
    const result = await this.client.train(
      this.state.sessionId!, wav, classSpecString(this.wizard.plan));
    if (result.ok) {
      this.dispatch({ type: 'TRAIN_SUCCEEDED', summary: result.summary });
    } else {
      this.dispatch({
        type: 'TRAIN_MISMATCH',
        found: result.mismatch.found,
        expected: result.mismatch.expected,
      });
    }
  }

  async performOffline(): Promise<void> {
    if (!this.capture.active) {
      await this.capture.start();
      el<HTMLButtonElement>('record-performance').textContent = 'stop and transcribe';
      return;
    }
    const pcm = await this.capture.stop();
    el<HTMLButtonElement>('record-performance').textContent = 'record performance';
    this.dispatch({ type: 'START_PERFORMING' });
    const result = await this.client.transcribe(
      this.state.sessionId!, encodeWavPcm16(pcm, SERVICE_SAMPLE_RATE));
    this.dispatch({ type: 'PERFORMANCE_DONE', events: result.events, duration: result.duration });
  }

  async performLive(): Promise<void> {
    if (!this.capture.active) {
      await this.capture.start();
      el<HTMLButtonElement>('record-live').textContent = 'stop live take';
      return;
    }
    const pcm = await this.capture.stop();
    el<HTMLButtonElement>('record-live').textContent = 'record live';
    this.dispatch({ type: 'START_PERFORMING' });
    const result = await this.client.live(this.state.sessionId!, pcm, (event) => {
      this.dispatch({ type: 'EVENT_RECEIVED', event });
    });
    this.dispatch({ type: 'PERFORMANCE_DONE', events: result.events, duration: result.duration });
  }

  render(): void {
    el('phase').textContent = this.state.phase;
    const wizardBox = el('wizard');
    if (this.state.phase === 'enrolling') {
      wizardBox.hidden = false;
      const list = el('take-list');
      list.innerHTML = '';
      for (const c of this.wizard.plan) {
        const row = document.createElement('li');
        const button = document.createElement('button');
        button.textContent = this.wizard.hasTake(c.name)
          ? `re-record ${c.name}` : `record ${c.count}x ${c.name}`;
        button.onclick = () => void this.toggleTake(c.name, button);
        row.append(button);
        list.append(row);
      }
      el<HTMLButtonElement>('train').disabled = !this.wizard.isComplete();
      const mismatch = el('mismatch');
      if (this.state.lastMismatch) {
        mismatch.hidden = false;
        mismatch.textContent = this.wizard.mismatchMessage(
          this.state.lastMismatch.found, this.state.lastMismatch.expected);
      } else {
        mismatch.hidden = true;
      }
    } else {
      wizardBox.hidden = true;
    }

    const summary = el('training-summary');
    if (this.state.lastTraining) {
      const s = this.state.lastTraining;
      summary.hidden = false;
      summary.textContent =
        `${s.onsetsFound}/${s.expected} sounds · features: ` +
        `${s.selectedFeatures.join(', ')} · accuracy ${(100 * s.trainingAccuracy).toFixed(0)}%`;
    } else {
      summary.hidden = true;
    }

    const canPerform = this.state.phase === 'trained';
    el<HTMLButtonElement>('record-performance').disabled =
      !canPerform && this.state.phase !== 'performing';
    el<HTMLButtonElement>('record-live').disabled =
      !canPerform && this.state.phase !== 'performing';

    const layout = pianoRollLayout(
      this.state.events,
      this.state.lastTraining ? this.wizard.plan.map((c) => c.name) : [],
      this.state.duration);
    el('roll').innerHTML = renderPianoRollSvg(layout);
    const exportLink = el<HTMLAnchorElement>('export');
    exportLink.toggleAttribute('aria-disabled', !layout.exportEnabled);
    exportLink.href = layout.exportEnabled && this.state.sessionId
      ? this.client.midiUrl(this.state.sessionId) : '#';
    el<HTMLButtonElement>('audition').disabled = !layout.exportEnabled;
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void new StudioApp().init();
}
