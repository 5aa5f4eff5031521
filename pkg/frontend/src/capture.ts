// Microphone capture glue (browser only). Buffers raw Float32 frames
// from a ScriptProcessorNode and converts them to the service PCM
// format on stop. Kept deliberately thin; the conversion logic lives in
// audio.ts where it is unit tested.

import { captureToServicePcm } from './audio.js';

export class MicCapture {
  private context: AudioContext | null = null;
  private stream: MediaStream | null = null;
  private processor: ScriptProcessorNode | null = null;
  private frames: Float32Array[][] = [];

  get active(): boolean {
    return this.context !== null;
  }

  async start(): Promise<void> {
    if (this.active) throw new Error('capture already running');
    this.stream = await navigator.mediaDevices.getUserMedia({
      audio: { echoCancellation: false, noiseSuppression: false, autoGainControl: false },
    });
    this.context = new AudioContext();
    const source = this.context.createMediaStreamSource(this.stream);
    this.processor = this.context.createScriptProcessor(4096, source.channelCount || 1, 1);
    this.frames = [];
    this.processor.onaudioprocess = (event) => {
      const channels: Float32Array[] = [];
      for (let c = 0; c < event.inputBuffer.numberOfChannels; c++) {
        channels.push(new Float32Array(event.inputBuffer.getChannelData(c)));
      }
      this.frames.push(channels);
    };
    source.connect(this.processor);
    this.processor.connect(this.context.destination);
  }

  /** Stop and return service-format PCM (16-bit mono 44100). */
  async stop(): Promise<Int16Array> {
    if (!this.context) throw new Error('capture not running');
    const rate = this.context.sampleRate;
    this.processor?.disconnect();
    this.stream?.getTracks().forEach((track) => track.stop());
    await this.context.close();
    const frames = this.frames;
    this.context = null;
    this.stream = null;
    this.processor = null;
    this.frames = [];
    if (frames.length === 0) return new Int16Array(0);
    return captureToServicePcm(frames, rate);
  }
}
