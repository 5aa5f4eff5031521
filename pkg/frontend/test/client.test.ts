import { describe, expect, it, vi } from 'vitest';

import { VoxdrumClient } from '../src/client';

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

describe('service client', () => {
  it('creates sessions', async () => {
    const fetchImpl = vi.fn(async () => jsonResponse(200, { id: 'abc123' }));
    const client = new VoxdrumClient('http://svc:1', { fetchImpl: fetchImpl as typeof fetch });
    expect(await client.createSession()).toBe('abc123');
    expect(fetchImpl).toHaveBeenCalledWith('http://svc:1/api/sessions', { method: 'POST' });
  });

  it('posts multipart training data and parses the summary', async () => {
    const fetchImpl = vi.fn(async (_url: unknown, init?: RequestInit) => {
      const form = init?.body as FormData;
      expect(form.get('classes')).toBe('kick:5,snare:5,hihat:5');
      expect(form.get('audio')).toBeInstanceOf(Blob);
      return jsonResponse(200, {
        onsets_found: 15, expected: 15,
        selected_features: ['mfcc_1'], training_accuracy: 1.0,
      });
    });
    const client = new VoxdrumClient('http://svc:1', { fetchImpl: fetchImpl as typeof fetch });
    const result = await client.train('s1', new ArrayBuffer(16), 'kick:5,snare:5,hihat:5');
    expect(result).toEqual({
      ok: true,
      summary: {
        onsetsFound: 15, expected: 15,
        selectedFeatures: ['mfcc_1'], trainingAccuracy: 1.0,
      },
    });
  });

  it('maps a 409 to a mismatch result instead of throwing', async () => {
    const fetchImpl = vi.fn(async () => jsonResponse(409, {
      detail: { error: 'onset count mismatch', onsets_found: 14, expected: 15 },
    }));
    const client = new VoxdrumClient('http://svc:1', { fetchImpl: fetchImpl as typeof fetch });
    const result = await client.train('s1', new ArrayBuffer(4), 'kick:5,snare:5,hihat:5');
    expect(result).toEqual({ ok: false, mismatch: { found: 14, expected: 15 } });
  });

  it('throws on other failures', async () => {
    const fetchImpl = vi.fn(async () => jsonResponse(404, { detail: 'unknown session' }));
    const client = new VoxdrumClient('http://svc:1', { fetchImpl: fetchImpl as typeof fetch });
    await expect(client.train('nope', new ArrayBuffer(4), 'a:1,b:1')).rejects.toThrow('404');
  });

  it('builds midi urls with the tempo', () => {
    const client = new VoxdrumClient('http://svc:1/');
    expect(client.midiUrl('s9', 140)).toBe('http://svc:1/api/sessions/s9/midi?tempo=140');
  });

  it('streams chunks over an injected websocket and resolves on done', async () => {
    const sent: ArrayBuffer[] = [];
    let socket: any;
    const wsFactory = (url: string) => {
      expect(url).toBe('ws://svc:1/api/sessions/s1/live');
      socket = {
        binaryType: '',
        onmessage: null, onerror: null, onclose: null, onopen: null,
        send: (data: ArrayBuffer) => sent.push(data),
        close: vi.fn(),
      };
      queueMicrotask(() => {
        socket.onopen?.({});
        queueMicrotask(() => {
          socket.onmessage?.({ data: JSON.stringify({ type: 'event', time: 0.3, label: 'kick', velocity: 90 }) });
          socket.onmessage?.({ data: JSON.stringify({ type: 'done', event_count: 1, duration: 1.5 }) });
        });
      });
      return socket;
    };
    const client = new VoxdrumClient('http://svc:1', { wsFactory });
    const seen: string[] = [];
    const result = await client.live('s1', new Int16Array(10000), (e) => seen.push(e.label));
    expect(result.events).toEqual([{ time: 0.3, label: 'kick', velocity: 90 }]);
    expect(result.duration).toBe(1.5);
    expect(seen).toEqual(['kick']);
    expect(sent.length).toBe(Math.ceil(10000 / 4410));
    const lastHeader = new DataView(sent[sent.length - 1]);
    expect(lastHeader.getUint8(8)).toBe(1);
  });

  it('rejects when the stream reports an error', async () => {
    const wsFactory = () => {
      const socket: any = {
        binaryType: '', onmessage: null, onerror: null, onclose: null, onopen: null,
        send: () => {}, close: vi.fn(),
      };
      queueMicrotask(() => {
        socket.onmessage?.({ data: JSON.stringify({ type: 'error', detail: 'not trained' }) });
      });
      return socket;
    };
    const client = new VoxdrumClient('http://svc:1', { wsFactory });
    await expect(client.live('s1', new Int16Array(4))).rejects.toThrow('not trained');
  });
});
