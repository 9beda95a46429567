/**
 * Reader for GDF biosignal files, versions 1.x and 2.x.
 *
 * Both layouts share the same skeleton: a 256-byte fixed header, one
 * 256-byte info block per signal (stored field-major: all labels, then
 * all transducer types, ...), interleaved data records, and an optional
 * event table after the last record. The per-signal block internals and
 * the meaning of the header-length field differ between the two major
 * versions, which is why this file carries two signal-block parsers.
 */

import * as fs from "fs";

export interface GdfSignal {
  label: string;
  physicalDimension: string;
  physicalMin: number;
  physicalMax: number;
  digitalMin: number;
  digitalMax: number;
  samplesPerRecord: number;
  /** GDF sample type code (1..7 integer types, 16/17 float types). */
  typeCode: number;
  samplingRateHz: number;
}

export interface GdfEvent {
  /** 0-based sample index (the file stores 1-based positions). */
  position: number;
  type: number;
  /** 1-based channel association, mode-3 tables only (0 = all). */
  channel?: number;
  durationSamples?: number;
}

export interface GdfRecording {
  version: string;
  recordCount: number;
  recordDurationS: number;
  signals: GdfSignal[];
  events: GdfEvent[];
  /** Physically scaled samples, one array per signal, record-concatenated. */
  samples: Float64Array[];
}

const FIXED_HEADER_BYTES = 256;
const SIGNAL_BLOCK_BYTES = 256;

const SAMPLE_BYTES: Record<number, number> = {
  1: 1, // int8
  2: 1, // uint8
  3: 2, // int16
  4: 2, // uint16
  5: 4, // int32
  6: 4, // uint32
  7: 8, // int64
  16: 4, // float32
  17: 8, // float64
};

function ascii(buf: Buffer, start: number, length: number): string {
  return buf.subarray(start, start + length).toString("latin1").replace(/\0/g, "").trim();
}

function readSample(view: DataView, offset: number, typeCode: number): number {
  switch (typeCode) {
    case 1:
      return view.getInt8(offset);
    case 2:
      return view.getUint8(offset);
    case 3:
      return view.getInt16(offset, true);
    case 4:
      return view.getUint16(offset, true);
    case 5:
      return view.getInt32(offset, true);
    case 6:
      return view.getUint32(offset, true);
    case 7:
      return Number(view.getBigInt64(offset, true));
    case 16:
      return view.getFloat32(offset, true);
    case 17:
      return view.getFloat64(offset, true);
    default:
      throw new Error(`unsupported GDF sample type code ${typeCode}`);
  }
}

/** Signal info blocks, GDF 1.x layout. Offsets are field-major. */
function parseSignalsV1(
  buf: Buffer,
  view: DataView,
  signalCount: number,
  recordDurationS: number
): GdfSignal[] {
  const base = FIXED_HEADER_BYTES;
  const signals: GdfSignal[] = [];
  const at = (field: number, width: number, i: number) =>
    base + field * signalCount + width * i;
  // Field byte offsets within the concatenated blocks:
  // label 16, transducer 80, physdim 8, physmin f64, physmax f64,
  // digmin i64, digmax i64, prefilter 80, spr u32, type u32, reserved 32.
  const ofs = {
    label: 0,
    physDim: 96,
    physMin: 104,
    physMax: 112,
    digMin: 120,
    digMax: 128,
    preFilter: 136,
    spr: 216,
    type: 220,
  };
  for (let i = 0; i < signalCount; i++) {
    const spr = view.getUint32(at(ofs.spr, 4, i), true);
    signals.push({
      label: ascii(buf, at(ofs.label, 16, i), 16),
      physicalDimension: ascii(buf, at(ofs.physDim, 8, i), 8),
      physicalMin: view.getFloat64(at(ofs.physMin, 8, i), true),
      physicalMax: view.getFloat64(at(ofs.physMax, 8, i), true),
      digitalMin: Number(view.getBigInt64(at(ofs.digMin, 8, i), true)),
      digitalMax: Number(view.getBigInt64(at(ofs.digMax, 8, i), true)),
      samplesPerRecord: spr,
      typeCode: view.getUint32(at(ofs.type, 4, i), true),
      samplingRateHz: spr / recordDurationS,
    });
  }
  return signals;
}

/** Signal info blocks, GDF 2.x layout. */
function parseSignalsV2(
  buf: Buffer,
  view: DataView,
  signalCount: number,
  recordDurationS: number
): GdfSignal[] {
  const base = FIXED_HEADER_BYTES;
  const at = (field: number, width: number, i: number) =>
    base + field * signalCount + width * i;
  // label 16, transducer 80, physdim 6, physdimcode u16, physmin f64,
  // physmax f64, digmin f64, digmax f64, prefilter 68, lowpass f32,
  // highpass f32, notch f32, spr u32, type u32, sensor pos 3xf32,
  // sensor info 20.
  const ofs = {
    label: 0,
    physDim: 96,
    physMin: 104,
    physMax: 112,
    digMin: 120,
    digMax: 128,
    spr: 216,
    type: 220,
  };
  const signals: GdfSignal[] = [];
  for (let i = 0; i < signalCount; i++) {
    const spr = view.getUint32(at(ofs.spr, 4, i), true);
    signals.push({
      label: ascii(buf, at(ofs.label, 16, i), 16),
      physicalDimension: ascii(buf, at(ofs.physDim, 6, i), 6),
      physicalMin: view.getFloat64(at(ofs.physMin, 8, i), true),
      physicalMax: view.getFloat64(at(ofs.physMax, 8, i), true),
      digitalMin: view.getFloat64(at(ofs.digMin, 8, i), true),
      digitalMax: view.getFloat64(at(ofs.digMax, 8, i), true),
      samplesPerRecord: spr,
      typeCode: view.getUint32(at(ofs.type, 4, i), true),
      samplingRateHz: spr / recordDurationS,
    });
  }
  return signals;
}

function parseEventTable(buf: Buffer, view: DataView, offset: number): GdfEvent[] {
  if (offset + 8 > buf.length) {
    return [];
  }
  const mode = view.getUint8(offset);
  if (mode !== 1 && mode !== 3) {
    throw new Error(`unsupported event table mode ${mode}`);
  }
  const count =
    view.getUint8(offset + 1) |
    (view.getUint8(offset + 2) << 8) |
    (view.getUint8(offset + 3) << 16);
  let cursor = offset + 8; // mode u8 + count u24 + event sample rate f32
  const need = count * (mode === 3 ? 12 : 6);
  if (cursor + need > buf.length) {
    throw new Error(
      `event table truncated: needs ${need} bytes, file has ${buf.length - cursor}`
    );
  }
  const events: GdfEvent[] = [];
  for (let i = 0; i < count; i++) {
    events.push({
      position: view.getUint32(cursor + 4 * i, true) - 1,
      type: 0,
    });
  }
  cursor += 4 * count;
  for (let i = 0; i < count; i++) {
    events[i].type = view.getUint16(cursor + 2 * i, true);
  }
  cursor += 2 * count;
  if (mode === 3) {
    for (let i = 0; i < count; i++) {
      events[i].channel = view.getUint16(cursor + 2 * i, true);
    }
    cursor += 2 * count;
    for (let i = 0; i < count; i++) {
      events[i].durationSamples = view.getUint32(cursor + 4 * i, true);
    }
  }
  return events;
}

export function parseGdf(buf: Buffer, withSamples = true): GdfRecording {
  if (buf.length < FIXED_HEADER_BYTES) {
    throw new Error(`not a GDF file: only ${buf.length} bytes`);
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  const version = ascii(buf, 0, 8);
  if (!version.startsWith("GDF")) {
    throw new Error(`not a GDF file: magic reads "${version}"`);
  }
  const major = parseFloat(version.substring(3));
  if (!(major >= 1) || major >= 3) {
    throw new Error(`unsupported GDF version "${version}"`);
  }
  const isV1 = major < 2;

  // GDF1 stores the header length as int64 bytes; GDF2 as a uint16
  // count of 256-byte blocks.
  const headerBytes = isV1
    ? Number(view.getBigInt64(184, true))
    : view.getUint16(184, true) * 256;
  const recordCount = Number(view.getBigInt64(236, true));
  const durationNum = view.getUint32(244, true);
  const durationDen = view.getUint32(248, true);
  const signalCount = view.getUint16(252, true);
  if (durationDen === 0) {
    throw new Error("record duration denominator is zero");
  }
  const recordDurationS = durationNum / durationDen;
  const expectHeader = FIXED_HEADER_BYTES + signalCount * SIGNAL_BLOCK_BYTES;
  if (headerBytes < expectHeader) {
    throw new Error(
      `header declares ${headerBytes} bytes but ${signalCount} signals need ${expectHeader}`
    );
  }
  if (buf.length < expectHeader) {
    throw new Error(`file truncated inside signal headers (${buf.length} bytes)`);
  }

  const signals = isV1
    ? parseSignalsV1(buf, view, signalCount, recordDurationS)
    : parseSignalsV2(buf, view, signalCount, recordDurationS);

  let recordBytes = 0;
  for (const s of signals) {
    const width = SAMPLE_BYTES[s.typeCode];
    if (width === undefined) {
      throw new Error(`unsupported GDF sample type code ${s.typeCode} (${s.label})`);
    }
    recordBytes += s.samplesPerRecord * width;
  }
  const dataEnd = headerBytes + recordCount * recordBytes;
  if (buf.length < dataEnd) {
    throw new Error(
      `file truncated: ${recordCount} records need ${dataEnd} bytes, got ${buf.length}`
    );
  }

  const samples: Float64Array[] = signals.map(
    (s) => new Float64Array(withSamples ? s.samplesPerRecord * recordCount : 0)
  );
  if (withSamples) {
    const slope = signals.map((s) => {
      const digSpan = s.digitalMax - s.digitalMin;
      const physSpan = s.physicalMax - s.physicalMin;
      // Degenerate calibration means the stored values are physical.
      return digSpan !== 0 && physSpan !== 0 ? physSpan / digSpan : NaN;
    });
    let cursor = headerBytes;
    for (let r = 0; r < recordCount; r++) {
      for (let i = 0; i < signals.length; i++) {
        const s = signals[i];
        const width = SAMPLE_BYTES[s.typeCode];
        const out = samples[i];
        const outBase = r * s.samplesPerRecord;
        for (let k = 0; k < s.samplesPerRecord; k++) {
          const dig = readSample(view, cursor + k * width, s.typeCode);
          out[outBase + k] = Number.isNaN(slope[i])
            ? dig
            : (dig - s.digitalMin) * slope[i] + s.physicalMin;
        }
        cursor += s.samplesPerRecord * width;
      }
    }
  }

  const events = parseEventTable(buf, view, dataEnd);
  return { version, recordCount, recordDurationS, signals, events, samples };
}

export function readGdf(path: string, withSamples = true): GdfRecording {
  let buf: Buffer;
  try {
    buf = fs.readFileSync(path);
  } catch (err) {
    throw new Error(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseGdf(buf, withSamples);
}
