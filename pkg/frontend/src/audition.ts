// Audition: a simple WebAudio trigger per class so the transcription
// can be heard without leaving the page. Fidelity is beside the point;
// a thump, a burst and a tick are enough to judge the pattern.

import { UiEvent } from './state.js';

function trigger(context: AudioContext, label: string, at: number, velocity: number): void {
  const gainValue = 0.15 + 0.6 * (velocity / 127);
  const gain = context.createGain();
  gain.connect(context.destination);
  if (label === 'kick') {
    const osc = context.createOscillator();
    osc.frequency.setValueAtTime(110, at);
    osc.frequency.exponentialRampToValueAtTime(45, at + 0.1);
    osc.connect(gain);
    gain.gain.setValueAtTime(gainValue, at);
    gain.gain.exponentialRampToValueAtTime(1e-3, at + 0.18);
    osc.start(at);
    osc.stop(at + 0.2);
    return;
  }
  const length = label === 'snare' ? 0.12 : 0.05;
  const buffer = context.createBuffer(1, Math.ceil(length * context.sampleRate), context.sampleRate);
  const data = buffer.getChannelData(0);
  for (let i = 0; i < data.length; i++) data[i] = (Math.random() * 2 - 1) * (1 - i / data.length);
  const source = context.createBufferSource();
  source.buffer = buffer;
  if (label !== 'snare') {
    const highpass = context.createBiquadFilter();
    highpass.type = 'highpass';
    highpass.frequency.value = 6000;
    source.connect(highpass);
    highpass.connect(gain);
  } else {
    source.connect(gain);
  }
  gain.gain.setValueAtTime(gainValue, at);
  source.start(at);
}

export function playTranscription(events: UiEvent[]): void {
  if (events.length === 0) return;
  const context = new AudioContext();
  const start = context.currentTime + 0.1;
  for (const event of events) trigger(context, event.label, start + event.time, event.velocity);
}
