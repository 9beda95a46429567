/**
 * Writer for EpochSet directories: a manifest.json describing the tensor
 * and a raw little-endian float32 data file, trial-major. The schema is
 * the exchange contract with the analysis package that consumes these
 * sets, so the field names and value formats here must not drift.
 */

import * as crypto from "crypto";
import * as fs from "fs";
import * as path from "path";

export interface EpochSet {
  subjectId: string;
  fsHz: number;
  channelNames: string[];
  labels: string[];
  cueSample: number;
  nTrials: number;
  nChannels: number;
  nSamples: number;
  /** Flat trial-major tensor, length nTrials * nChannels * nSamples. */
  data: Float32Array;
}

export function validateEpochSet(set: EpochSet): string[] {
  const problems: string[] = [];
  const expected = set.nTrials * set.nChannels * set.nSamples;
  if (set.data.length !== expected) {
    problems.push(
      `data length ${set.data.length} does not match shape ` +
        `${set.nTrials}x${set.nChannels}x${set.nSamples}`
    );
  }
  if (set.channelNames.length !== set.nChannels) {
    problems.push(
      `${set.channelNames.length} channel names for ${set.nChannels} channels`
    );
  }
  if (new Set(set.channelNames).size !== set.channelNames.length) {
    problems.push("duplicate channel names");
  }
  if (set.labels.length !== set.nTrials) {
    problems.push(`${set.labels.length} labels for ${set.nTrials} trials`);
  }
  if (!(set.cueSample >= 0 && set.cueSample < set.nSamples)) {
    problems.push(`cue sample ${set.cueSample} outside [0, ${set.nSamples})`);
  }
  if (!(set.fsHz > 0)) {
    problems.push(`sampling rate ${set.fsHz} is not positive`);
  }
  for (let i = 0; i < set.data.length; i++) {
    if (!Number.isFinite(set.data[i])) {
      problems.push(`non-finite sample at flat index ${i}`);
      break;
    }
  }
  return problems;
}

export function writeEpochSet(set: EpochSet, outDir: string): string {
  const problems = validateEpochSet(set);
  if (problems.length > 0) {
    throw new Error(`refusing to write invalid epoch set: ${problems.join("; ")}`);
  }
  fs.mkdirSync(outDir, { recursive: true });

  const bytes = Buffer.alloc(set.data.length * 4);
  for (let i = 0; i < set.data.length; i++) {
    bytes.writeFloatLE(set.data[i], i * 4);
  }
  const dataPath = path.join(outDir, "data.f32");
  fs.writeFileSync(dataPath, bytes);

  const manifest = {
    format_version: 1,
    subject_id: set.subjectId,
    fs_hz: set.fsHz,
    channel_names: set.channelNames,
    labels: set.labels,
    cue_sample: set.cueSample,
    n_trials: set.nTrials,
    n_channels: set.nChannels,
    n_samples: set.nSamples,
    dtype: "float32-le",
    layout: "trial-major",
    data_file: "data.f32",
    checksum: crypto.createHash("sha256").update(bytes).digest("hex"),
  };
  const manifestPath = path.join(outDir, "manifest.json");
  fs.writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + "\n");
  return manifestPath;
}

/** Read back a written set; used by tests and the label histogram check. */
export function readEpochSet(manifestPath: string): EpochSet {
  const manifest = JSON.parse(fs.readFileSync(manifestPath, "utf8"));
  const dataPath = path.join(path.dirname(manifestPath), manifest.data_file);
  const bytes = fs.readFileSync(dataPath);
  const expected = manifest.n_trials * manifest.n_channels * manifest.n_samples * 4;
  if (bytes.length !== expected) {
    throw new Error(`${dataPath}: expected ${expected} bytes, got ${bytes.length}`);
  }
  const data = new Float32Array(manifest.n_trials * manifest.n_channels * manifest.n_samples);
  for (let i = 0; i < data.length; i++) {
    data[i] = bytes.readFloatLE(i * 4);
  }
  return {
    subjectId: manifest.subject_id,
    fsHz: manifest.fs_hz,
    channelNames: manifest.channel_names,
    labels: manifest.labels,
    cueSample: manifest.cue_sample,
    nTrials: manifest.n_trials,
    nChannels: manifest.n_channels,
    nSamples: manifest.n_samples,
    data,
  };
}
