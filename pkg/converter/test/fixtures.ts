/**
 * Synthetic GDF buffers for tests, written field by field from the format
 * tables rather than through the reader under test.
 */

export interface FixtureSignal {
  label: string;
  samplesPerRecord: number;
  typeCode: number;
  physicalMin: number;
  physicalMax: number;
  digitalMin: number;
  digitalMax: number;
  /** Digital sample values, length samplesPerRecord * recordCount. */
  data: ArrayLike<number>;
}

export interface FixtureEvent {
  /** 0-based sample index; the file stores 1-based. */
  position: number;
  type: number;
  channel?: number;
  durationSamples?: number;
}

export interface FixtureSpec {
  version: "GDF 1.25" | "GDF 2.10";
  recordCount: number;
  durationNumerator: number;
  durationDenominator: number;
  signals: FixtureSignal[];
  eventMode?: 1 | 3;
  events?: FixtureEvent[];
}

const SAMPLE_BYTES: Record<number, number> = {
  1: 1, 2: 1, 3: 2, 4: 2, 5: 4, 6: 4, 7: 8, 16: 4, 17: 8,
};

function writeSample(buf: Buffer, offset: number, typeCode: number, value: number): void {
  switch (typeCode) {
    case 1: buf.writeInt8(value, offset); break;
    case 2: buf.writeUInt8(value, offset); break;
    case 3: buf.writeInt16LE(value, offset); break;
    case 4: buf.writeUInt16LE(value, offset); break;
    case 5: buf.writeInt32LE(value, offset); break;
    case 6: buf.writeUInt32LE(value, offset); break;
    case 7: buf.writeBigInt64LE(BigInt(Math.round(value)), offset); break;
    case 16: buf.writeFloatLE(value, offset); break;
    case 17: buf.writeDoubleLE(value, offset); break;
    default: throw new Error(`fixture: bad type code ${typeCode}`);
  }
}

export function buildGdf(spec: FixtureSpec): Buffer {
  const ns = spec.signals.length;
  const headerBytes = 256 * (1 + ns);
  const recordBytes = spec.signals.reduce(
    (sum, s) => sum + s.samplesPerRecord * SAMPLE_BYTES[s.typeCode],
    0
  );
  const eventCount = spec.events?.length ?? 0;
  const eventMode = spec.eventMode ?? 1;
  const eventBytes = eventCount > 0 ? 8 + eventCount * (eventMode === 3 ? 12 : 6) : 0;
  const buf = Buffer.alloc(headerBytes + spec.recordCount * recordBytes + eventBytes);

  const isV1 = spec.version.startsWith("GDF 1");
  buf.write(spec.version, 0, "latin1");
  if (isV1) {
    buf.writeBigInt64LE(BigInt(headerBytes), 184);
  } else {
    buf.writeUInt16LE(1 + ns, 184);
  }
  buf.writeBigInt64LE(BigInt(spec.recordCount), 236);
  buf.writeUInt32LE(spec.durationNumerator, 244);
  buf.writeUInt32LE(spec.durationDenominator, 248);
  buf.writeUInt16LE(ns, 252);

  // Signal info blocks, field-major. Field start offsets within the
  // concatenated region, v1: label 0, transducer 16, physdim 96 (8 bytes),
  // physmin 104, physmax 112, digmin 120 (i64), digmax 128 (i64),
  // prefilter 136 (80), spr 216, type 220, reserved 224.
  // v2: label 0, transducer 16, physdim 96 (6), physdimcode 102, physmin
  // 104, physmax 112, digmin 120 (f64), digmax 128 (f64), prefilter 136
  // (68), lowpass 204, highpass 208, notch 212, spr 216, type 220,
  // sensor pos 224, sensor info 236.
  const base = 256;
  const at = (field: number, width: number, i: number) => base + field * ns + width * i;
  spec.signals.forEach((s, i) => {
    buf.write(s.label.substring(0, 16), at(0, 16, i), "latin1");
    buf.write("uV", at(96, isV1 ? 8 : 6, i), "latin1");
    buf.writeDoubleLE(s.physicalMin, at(104, 8, i));
    buf.writeDoubleLE(s.physicalMax, at(112, 8, i));
    if (isV1) {
      buf.writeBigInt64LE(BigInt(Math.round(s.digitalMin)), at(120, 8, i));
      buf.writeBigInt64LE(BigInt(Math.round(s.digitalMax)), at(128, 8, i));
    } else {
      buf.writeDoubleLE(s.digitalMin, at(120, 8, i));
      buf.writeDoubleLE(s.digitalMax, at(128, 8, i));
    }
    buf.writeUInt32LE(s.samplesPerRecord, at(216, 4, i));
    buf.writeUInt32LE(s.typeCode, at(220, 4, i));
  });

  let cursor = headerBytes;
  for (let r = 0; r < spec.recordCount; r++) {
    for (const s of spec.signals) {
      const width = SAMPLE_BYTES[s.typeCode];
      for (let k = 0; k < s.samplesPerRecord; k++) {
        writeSample(buf, cursor + k * width, s.typeCode, s.data[r * s.samplesPerRecord + k]);
      }
      cursor += s.samplesPerRecord * width;
    }
  }

  if (eventCount > 0 && spec.events) {
    buf.writeUInt8(eventMode, cursor);
    buf.writeUInt8(eventCount & 0xff, cursor + 1);
    buf.writeUInt8((eventCount >> 8) & 0xff, cursor + 2);
    buf.writeUInt8((eventCount >> 16) & 0xff, cursor + 3);
    buf.writeFloatLE(0, cursor + 4);
    cursor += 8;
    for (const e of spec.events) {
      buf.writeUInt32LE(e.position + 1, cursor);
      cursor += 4;
    }
    for (const e of spec.events) {
      buf.writeUInt16LE(e.type, cursor);
      cursor += 2;
    }
    if (eventMode === 3) {
      for (const e of spec.events) {
        buf.writeUInt16LE(e.channel ?? 0, cursor);
        cursor += 2;
      }
      for (const e of spec.events) {
        buf.writeUInt32LE(e.durationSamples ?? 0, cursor);
        cursor += 4;
      }
    }
  }
  return buf;
}

/** Deterministic unit-interval generator to fill fixture signals. */
export function lcg(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (Math.imul(1664525, state) + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

export const IV2A_LABELS = [
  "EEG-Fz", "EEG-0", "EEG-1", "EEG-2", "EEG-3", "EEG-4", "EEG-5",
  "EEG-C3", "EEG-6", "EEG-Cz", "EEG-7", "EEG-C4", "EEG-8", "EEG-9",
  "EEG-10", "EEG-11", "EEG-Pz", "EEG-12", "EEG-13", "EEG-14", "EEG-15",
  "EEG-16", "EOG-left", "EOG-central", "EOG-right",
];

export interface SessionOptions {
  /** Cues per class; classes are the keys of cueCodes. */
  trialsPerClass: number;
  cueCodes?: number[];
  fsHz?: number;
  firstCueS?: number;
  cueSpacingS?: number;
  /** 0-based cue indices to cover with a rejection marker. */
  rejectTrials?: number[];
  eventMode?: 1 | 3;
  seed?: number;
}

/**
 * A full training-session-shaped GDF 2.x buffer with the 25-signal
 * layout of the four-class dataset: float32 storage, identity
 * calibration, cue events in a repeating class pattern, a trial-start
 * event before each cue, and optional rejection markers.
 */
export function buildIv2aSession(options: SessionOptions): {
  buffer: Buffer;
  cuePositions: number[];
  cueTypes: number[];
} {
  const fs = options.fsHz ?? 250;
  const cueCodes = options.cueCodes ?? [769, 770, 771, 772];
  const firstCue = options.firstCueS ?? 8;
  const spacing = options.cueSpacingS ?? 8;
  const nCues = options.trialsPerClass * cueCodes.length;
  const totalS = Math.ceil(firstCue + spacing * (nCues - 1) + 5);
  const next = lcg(options.seed ?? 1);

  const cuePositions: number[] = [];
  const cueTypes: number[] = [];
  const events: FixtureEvent[] = [{ position: Math.round(0.5 * fs), type: 32766 }];
  for (let i = 0; i < nCues; i++) {
    const position = Math.round((firstCue + spacing * i) * fs);
    const type = cueCodes[i % cueCodes.length];
    cuePositions.push(position);
    cueTypes.push(type);
    events.push({ position: Math.max(0, position - 2 * fs), type: 768 });
    events.push({ position, type });
  }
  for (const t of options.rejectTrials ?? []) {
    events.push({
      position: Math.max(0, cuePositions[t] - 2 * fs),
      type: 1023,
      durationSamples: options.eventMode === 3 ? 7 * fs : undefined,
    });
  }
  events.sort((a, b) => a.position - b.position);

  const n = totalS * fs;
  const signals: FixtureSignal[] = IV2A_LABELS.map((label, idx) => {
    const data = new Float64Array(n);
    for (let k = 0; k < n; k++) {
      data[k] = Math.sin((2 * Math.PI * 10 * k) / fs + idx) + 0.3 * (next() - 0.5);
    }
    return {
      label,
      samplesPerRecord: fs,
      typeCode: 16,
      physicalMin: -1000,
      physicalMax: 1000,
      digitalMin: -1000,
      digitalMax: 1000,
      data,
    };
  });

  return {
    buffer: buildGdf({
      version: "GDF 2.10",
      recordCount: totalS,
      durationNumerator: 1,
      durationDenominator: 1,
      signals,
      eventMode: options.eventMode ?? 1,
      events,
    }),
    cuePositions,
    cueTypes,
  };
}

/**
 * A two-class session in the GDF 1.x layout with the three-EEG-channel
 * montage of the two-class dataset, stored as scaled int16.
 */
export function buildIv2bSession(options: SessionOptions): {
  buffer: Buffer;
  cuePositions: number[];
  cueTypes: number[];
} {
  const fs = options.fsHz ?? 250;
  const cueCodes = options.cueCodes ?? [769, 770];
  const firstCue = options.firstCueS ?? 8;
  const spacing = options.cueSpacingS ?? 8;
  const nCues = options.trialsPerClass * cueCodes.length;
  const totalS = Math.ceil(firstCue + spacing * (nCues - 1) + 5);
  const next = lcg(options.seed ?? 2);

  const cuePositions: number[] = [];
  const cueTypes: number[] = [];
  const events: FixtureEvent[] = [];
  for (let i = 0; i < nCues; i++) {
    const position = Math.round((firstCue + spacing * i) * fs);
    const type = cueCodes[i % cueCodes.length];
    cuePositions.push(position);
    cueTypes.push(type);
    events.push({ position: Math.max(0, position - 3 * fs), type: 768 });
    events.push({ position, type });
  }
  for (const t of options.rejectTrials ?? []) {
    events.push({ position: Math.max(0, cuePositions[t] - 3 * fs), type: 1023 });
  }
  events.sort((a, b) => a.position - b.position);

  const labels = ["EEG:C3", "EEG:Cz", "EEG:C4", "EOG:ch01", "EOG:ch02", "EOG:ch03"];
  const n = totalS * fs;
  const signals: FixtureSignal[] = labels.map((label, idx) => {
    const data = new Float64Array(n);
    for (let k = 0; k < n; k++) {
      // Digital int16 counts; physical range +-100 uV over +-32767.
      data[k] = Math.round(8000 * Math.sin((2 * Math.PI * 12 * k) / fs + idx) + 2000 * (next() - 0.5));
    }
    return {
      label,
      samplesPerRecord: fs,
      typeCode: 3,
      physicalMin: -100,
      physicalMax: 100,
      digitalMin: -32767,
      digitalMax: 32767,
      data,
    };
  });

  return {
    buffer: buildGdf({
      version: "GDF 1.25",
      recordCount: totalS,
      durationNumerator: 1,
      durationDenominator: 1,
      signals,
      eventMode: options.eventMode ?? 1,
      events,
    }),
    cuePositions,
    cueTypes,
  };
}
