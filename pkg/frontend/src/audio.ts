// Capture-side audio conversion. The service speaks exactly one PCM
// format (signed 16-bit little-endian mono at 44100 Hz), so the browser
// does the downmix/resample before anything leaves the page.

export const SERVICE_SAMPLE_RATE = 44100;
export const CHUNK_HEADER_BYTES = 9;

export function downmixToMono(channels: Float32Array[]): Float32Array {
  if (channels.length === 0) throw new Error('no channels to downmix');
  if (channels.length === 1) return channels[0];
  const n = channels[0].length;
  const out = new Float32Array(n);
  for (const channel of channels) {
    if (channel.length !== n) throw new Error('channel lengths differ');
    for (let i = 0; i < n; i++) out[i] += channel[i];
  }
  for (let i = 0; i < n; i++) out[i] /= channels.length;
  return out;
}

export function resampleLinear(samples: Float32Array, srcRate: number, dstRate: number): Float32Array {
  if (srcRate === dstRate) return samples;
  const n = Math.max(1, Math.round((samples.length * dstRate) / srcRate));
  const out = new Float32Array(n);
  const step = srcRate / dstRate;
  for (let i = 0; i < n; i++) {
    const position = i * step;
    const low = Math.min(samples.length - 1, Math.floor(position));
    const high = Math.min(samples.length - 1, low + 1);
    const frac = position - low;
    out[i] = samples[low] + frac * (samples[high] - samples[low]);
  }
  return out;
}

export function floatToInt16(samples: Float32Array): Int16Array {
  const out = new Int16Array(samples.length);
  for (let i = 0; i < samples.length; i++) {
    const scaled = Math.floor(samples[i] * 32768 + 0.5);
    out[i] = Math.max(-32768, Math.min(32767, scaled));
  }
  return out;
}

/** RIFF/WAVE container around 16-bit mono PCM. */
export function encodeWavPcm16(pcm: Int16Array, sampleRate: number): ArrayBuffer {
  const dataBytes = pcm.length * 2;
  const buffer = new ArrayBuffer(44 + dataBytes);
  const view = new DataView(buffer);
  const ascii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };
  ascii(0, 'RIFF');
  view.setUint32(4, 36 + dataBytes, true);
  ascii(8, 'WAVE');
  ascii(12, 'fmt ');
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true); // PCM
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  ascii(36, 'data');
  view.setUint32(40, dataBytes, true);
  for (let i = 0; i < pcm.length; i++) view.setInt16(44 + i * 2, pcm[i], true);
  return buffer;
}

/** Extract 16-bit mono PCM from a WAV payload (integration tests). */
export function decodeWavPcm16(buffer: ArrayBuffer): { pcm: Int16Array; sampleRate: number } {
  const view = new DataView(buffer);
  const tag = (offset: number) =>
    String.fromCharCode(view.getUint8(offset), view.getUint8(offset + 1),
                        view.getUint8(offset + 2), view.getUint8(offset + 3));
  if (tag(0) !== 'RIFF' || tag(8) !== 'WAVE') throw new Error('not a WAV file');
  let offset = 12;
  let sampleRate = 0;
  while (offset + 8 <= view.byteLength) {
    const id = tag(offset);
    const size = view.getUint32(offset + 4, true);
    if (id === 'fmt ') {
      if (view.getUint16(offset + 8, true) !== 1) throw new Error('not PCM');
      if (view.getUint16(offset + 10, true) !== 1) throw new Error('not mono');
      if (view.getUint16(offset + 22, true) !== 16) throw new Error('not 16-bit');
      sampleRate = view.getUint32(offset + 12, true);
    } else if (id === 'data') {
      const pcm = new Int16Array(size / 2);
      for (let i = 0; i < pcm.length; i++) pcm[i] = view.getInt16(offset + 8 + i * 2, true);
      return { pcm, sampleRate };
    }
    offset += 8 + size + (size % 2);
  }
  throw new Error('no data chunk');
}

/**
 * Split PCM into live-stream chunks: 9-byte big-endian header
 * (uint32 sequence, uint32 payload bytes, uint8 final flag) + payload.
 */
export function frameChunks(pcm: Int16Array, samplesPerChunk: number): ArrayBuffer[] {
  if (samplesPerChunk < 1) throw new Error('samplesPerChunk must be >= 1');
  const chunks: ArrayBuffer[] = [];
  let seq = 0;
  let offset = 0;
  do {
    const take = Math.min(samplesPerChunk, pcm.length - offset);
    const payloadBytes = take * 2;
    const chunk = new ArrayBuffer(CHUNK_HEADER_BYTES + payloadBytes);
    const view = new DataView(chunk);
    const final = offset + take >= pcm.length;
    view.setUint32(0, seq, false);
    view.setUint32(4, payloadBytes, false);
    view.setUint8(8, final ? 1 : 0);
    for (let i = 0; i < take; i++) view.setInt16(CHUNK_HEADER_BYTES + i * 2, pcm[offset + i], true);
    chunks.push(chunk);
    offset += take;
    seq += 1;
  } while (offset < pcm.length);
  return chunks;
}

/** Microphone capture buffers to one service-format PCM array. */
export function captureToServicePcm(chunks: Float32Array[][], captureRate: number): Int16Array {
  const mono = chunks.map((frame) => downmixToMono(frame));
  let total = 0;
  for (const m of mono) total += m.length;
  const joined = new Float32Array(total);
  let offset = 0;
  for (const m of mono) {
    joined.set(m, offset);
    offset += m.length;
  }
  return floatToInt16(resampleLinear(joined, captureRate, SERVICE_SAMPLE_RATE));
}
