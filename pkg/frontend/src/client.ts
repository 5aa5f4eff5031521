// Service client. Everything the UI shows comes back from these calls;
// there is no client-side classification. fetch and WebSocket are
// injectable so node tests can supply their own implementations.

import { frameChunks } from './audio.js';
import { TrainingSummary, UiEvent } from './state.js';

export type TrainResult =
  | { ok: true; summary: TrainingSummary }
  | { ok: false; mismatch: { found: number; expected: number } };

export type TranscribeResult = { events: UiEvent[]; duration: number };

export type WebSocketLike = {
  binaryType: string;
  onmessage: ((event: { data: unknown }) => void) | null;
  onerror: ((event: unknown) => void) | null;
  onclose: ((event: unknown) => void) | null;
  onopen: ((event: unknown) => void) | null;
  send(data: ArrayBuffer): void;
  close(): void;
};

export type ClientOptions = {
  fetchImpl?: typeof fetch;
  wsFactory?: (url: string) => WebSocketLike;
};

const LIVE_CHUNK_SAMPLES = 4410; // 100 ms per chunk

export class VoxdrumClient {
  readonly baseUrl: string;
  private fetchImpl: typeof fetch;
  private wsFactory: (url: string) => WebSocketLike;

  constructor(baseUrl: string, options: ClientOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/$/, '');
    this.fetchImpl = options.fetchImpl ?? fetch.bind(globalThis);
    this.wsFactory = options.wsFactory ??
      ((url) => new WebSocket(url) as unknown as WebSocketLike);
  }

  async createSession(): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/sessions`, { method: 'POST' });
    if (!response.ok) throw new Error(`create session failed: ${response.status}`);
    return (await response.json()).id;
  }

  async train(sessionId: string, wav: ArrayBuffer, classes: string): Promise<TrainResult> {
    const form = new FormData();
    form.append('audio', new Blob([wav], { type: 'audio/wav' }), 'enrolment.wav');
    form.append('classes', classes);
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/sessions/${sessionId}/train`, { method: 'POST', body: form });
    if (response.status === 409) {
      const detail = (await response.json()).detail;
      return { ok: false, mismatch: { found: detail.onsets_found, expected: detail.expected } };
    }
    if (!response.ok) throw new Error(`train failed: ${response.status}`);
    const body = await response.json();
    return {
      ok: true,
      summary: {
        onsetsFound: body.onsets_found,
        expected: body.expected,
        selectedFeatures: body.selected_features,
        trainingAccuracy: body.training_accuracy,
      },
    };
  }

  async transcribe(sessionId: string, wav: ArrayBuffer): Promise<TranscribeResult> {
    const form = new FormData();
    form.append('audio', new Blob([wav], { type: 'audio/wav' }), 'performance.wav');
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/sessions/${sessionId}/transcribe`, { method: 'POST', body: form });
    if (!response.ok) throw new Error(`transcribe failed: ${response.status}`);
    return await response.json();
  }

  midiUrl(sessionId: string, tempo = 120): string {
    return `${this.baseUrl}/api/sessions/${sessionId}/midi?tempo=${tempo}`;
  }

  async fetchMidi(sessionId: string, tempo = 120): Promise<ArrayBuffer> {
    const response = await this.fetchImpl(this.midiUrl(sessionId, tempo));
    if (!response.ok) throw new Error(`midi export failed: ${response.status}`);
    return await response.arrayBuffer();
  }

  async fetchModelDocument(sessionId: string): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/sessions/${sessionId}/model`);
    if (!response.ok) throw new Error(`model download failed: ${response.status}`);
    return await response.text();
  }

  /**
   * Stream PCM over the live endpoint; onEvent fires per classified
   * event as the service emits it. Resolves with all events once the
   * service reports done.
   */
  live(
    sessionId: string,
    pcm: Int16Array,
    onEvent?: (event: UiEvent) => void,
  ): Promise<{ events: UiEvent[]; duration: number }> {
    const wsBase = this.baseUrl.replace(/^http/, 'ws');
    const socket = this.wsFactory(`${wsBase}/api/sessions/${sessionId}/live`);
    socket.binaryType = 'arraybuffer';
    const events: UiEvent[] = [];
    return new Promise((resolve, reject) => {
      socket.onopen = () => {
        for (const chunk of frameChunks(pcm, LIVE_CHUNK_SAMPLES)) socket.send(chunk);
      };
      socket.onmessage = (message) => {
        const body = JSON.parse(String(message.data));
        if (body.type === 'event') {
          const event = { time: body.time, label: body.label, velocity: body.velocity };
          events.push(event);
          onEvent?.(event);
        } else if (body.type === 'done') {
          socket.close();
          resolve({ events, duration: body.duration });
        } else {
          socket.close();
          reject(new Error(body.detail ?? 'live stream error'));
        }
      };
      socket.onerror = () => reject(new Error('live stream socket error'));
    });
  }
}
