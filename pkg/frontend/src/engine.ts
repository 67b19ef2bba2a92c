// WebAudio synth driven by EngineCommands from the reducer.
//
// The graph mirrors the offline renderer: nine sine carriers under per-partial
// gains, one shared 30 Hz modulator pushed into every carrier's frequency, a
// tremolo LFO on top, and a master gain that keeps the sum inside [-1, 1].
// Parameter changes ramp linearly over RETARGET_RAMP_MS so dragging across
// the map glides instead of clicking.  Exact audio is the server's job; this
// graph is the live preview of the same equations.

import { EngineCommand } from "./state.js";
import { FM_FREQUENCY_HZ, Voice, voiceFor } from "./synth-math.js";

export const RETARGET_RAMP_MS = 30;

export interface SynthEngine {
  run(command: EngineCommand): void;
}

interface ActiveVoice {
  oscillators: OscillatorNode[];
  ampGains: GainNode[];
  fmOsc: OscillatorNode;
  fmGain: GainNode;
  tremOsc: OscillatorNode;
  tremOscGain: GainNode;
  master: GainNode;
  extras: AudioNode[];
  tonePan: StereoPannerNode | null;
  noisePan: StereoPannerNode | null;
  noiseSource: AudioBufferSourceNode | null;
}

function voiceOf(params: number[]): Voice {
  return voiceFor(params[0], params[1], params[2], params[3]);
}

function ramp(param: AudioParam, target: number, now: number): void {
  param.cancelScheduledValues(now);
  param.setValueAtTime(param.value, now);
  param.linearRampToValueAtTime(target, now + RETARGET_RAMP_MS / 1000);
}

/** Looped colored-noise buffer, RMS 0.15.  First-order tilt approximation. */
function noiseBuffer(ctx: AudioContext, color: number, seconds = 2): AudioBuffer {
  const n = Math.round(seconds * ctx.sampleRate);
  const buffer = ctx.createBuffer(1, n, ctx.sampleRate);
  const data = buffer.getChannelData(0);
  let prev = 0;
  for (let i = 0; i < n; i++) {
    const white = Math.random() * 2 - 1;
    // blend toward a one-pole lowpass below color 0.5 and toward a first
    // difference above it; crude next to the offline FIR but close enough
    // for a live preview
    const low = prev + 0.12 * (white - prev);
    prev = low;
    const high = white - low;
    data[i] = color <= 0.5 ? low + (white - low) * (color * 2) : white + (high - white) * (color * 2 - 1);
  }
  let sum = 0;
  for (let i = 0; i < n; i++) sum += data[i] * data[i];
  const rms = Math.sqrt(sum / n) || 1;
  for (let i = 0; i < n; i++) data[i] *= 0.15 / rms;
  return buffer;
}

export class WebAudioEngine implements SynthEngine {
  private ctx: AudioContext | null = null;
  private voice: ActiveVoice | null = null;

  run(command: EngineCommand): void {
    switch (command.kind) {
      case "start":
        this.start(command.params);
        break;
      case "retarget":
        this.retarget(command.params);
        break;
      case "stop":
        this.stop();
        break;
    }
  }

  private context(): AudioContext {
    if (!this.ctx) {
      this.ctx = new AudioContext();
    }
    if (this.ctx.state === "suspended") {
      void this.ctx.resume();
    }
    return this.ctx;
  }

  private start(params: number[]): void {
    this.stop();
    const ctx = this.context();
    const now = ctx.currentTime;
    const voice = voiceOf(params);
    const extended = params.length === 7;

    const master = ctx.createGain();
    master.gain.value = voice.gain * (extended ? 0.5 : 1);

    // tremolo: carriers pass through a gain of (1 + sin); the LFO adds the
    // sine on top of the base gain of 1
    const trem = ctx.createGain();
    trem.gain.value = 1;
    const tremOsc = ctx.createOscillator();
    tremOsc.frequency.value = Math.max(voice.tremoloHz, 0.0001);
    const tremOscGain = ctx.createGain();
    // a zero-frequency oscillator freezes at an arbitrary sample, so gate
    // the LFO instead when the rate is zero
    tremOscGain.gain.value = voice.tremoloHz > 0 ? 1 : 0;
    tremOsc.connect(tremOscGain);
    tremOscGain.connect(trem.gain);

    const fmOsc = ctx.createOscillator();
    fmOsc.frequency.value = FM_FREQUENCY_HZ;
    const fmGain = ctx.createGain();
    // frequency deviation of index * f_m yields a phase index of `index`
    fmGain.gain.value = voice.fmIndex * FM_FREQUENCY_HZ;
    fmOsc.connect(fmGain);

    const oscillators: OscillatorNode[] = [];
    const ampGains: GainNode[] = [];
    for (let i = 0; i < voice.frequencies.length; i++) {
      const osc = ctx.createOscillator();
      osc.frequency.value = voice.frequencies[i];
      const amp = ctx.createGain();
      amp.gain.value = voice.amplitudes[i];
      fmGain.connect(osc.frequency);
      osc.connect(amp);
      amp.connect(trem);
      oscillators.push(osc);
      ampGains.push(amp);
    }
    trem.connect(master);

    const extras: AudioNode[] = [trem];
    let tonePan: StereoPannerNode | null = null;
    let noisePan: StereoPannerNode | null = null;
    let noiseSource: AudioBufferSourceNode | null = null;
    if (extended) {
      tonePan = ctx.createStereoPanner();
      tonePan.pan.value = params[6] * 2 - 1;
      master.connect(tonePan);
      tonePan.connect(ctx.destination);

      noiseSource = ctx.createBufferSource();
      noiseSource.buffer = noiseBuffer(ctx, params[4]);
      noiseSource.loop = true;
      const noiseGain = ctx.createGain();
      // roughly match the tone level; the offline path does this exactly
      const toneRms = voice.gain * Math.sqrt(1.5 * voice.amplitudes.reduce((a, v) => a + v * v, 0) / 2);
      noiseGain.gain.value = (toneRms / 0.15) * 0.5;
      noisePan = ctx.createStereoPanner();
      noisePan.pan.value = params[5] * 2 - 1;
      noiseSource.connect(noiseGain);
      noiseGain.connect(noisePan);
      noisePan.connect(ctx.destination);
      noiseSource.start(now);
      extras.push(noiseGain);
    } else {
      master.connect(ctx.destination);
    }

    for (const osc of [...oscillators, fmOsc, tremOsc]) {
      osc.start(now);
    }
    this.voice = {
      oscillators,
      ampGains,
      fmOsc,
      fmGain,
      tremOsc,
      tremOscGain,
      master,
      extras,
      tonePan,
      noisePan,
      noiseSource,
    };
  }

  private retarget(params: number[]): void {
    const active = this.voice;
    if (!active || !this.ctx) {
      this.start(params);
      return;
    }
    const now = this.ctx.currentTime;
    const voice = voiceOf(params);
    const extended = params.length === 7;
    for (let i = 0; i < active.oscillators.length; i++) {
      ramp(active.oscillators[i].frequency, voice.frequencies[i], now);
      ramp(active.ampGains[i].gain, voice.amplitudes[i], now);
    }
    ramp(active.fmGain.gain, voice.fmIndex * FM_FREQUENCY_HZ, now);
    ramp(active.tremOsc.frequency, Math.max(voice.tremoloHz, 0.0001), now);
    ramp(active.tremOscGain.gain, voice.tremoloHz > 0 ? 1 : 0, now);
    ramp(active.master.gain, voice.gain * (extended ? 0.5 : 1), now);
    if (extended && active.tonePan && active.noisePan) {
      ramp(active.tonePan.pan, params[6] * 2 - 1, now);
      ramp(active.noisePan.pan, params[5] * 2 - 1, now);
    }
  }

  private stop(): void {
    const active = this.voice;
    if (!active || !this.ctx) {
      return;
    }
    const now = this.ctx.currentTime;
    const end = now + 0.03;
    ramp(active.master.gain, 0, now);
    for (const osc of [...active.oscillators, active.fmOsc, active.tremOsc]) {
      osc.stop(end + 0.02);
    }
    active.noiseSource?.stop(end + 0.02);
    this.voice = null;
  }
}
