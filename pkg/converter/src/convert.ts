/**
 * Epoch extraction: turn a continuous recording plus cue events into a
 * trial-major EpochSet and write it next to its manifest.
 */

import * as path from "path";
import { readCsvRecording } from "./csv";
import { EpochSet, writeEpochSet } from "./epochset";
import { readGdf, GdfRecording } from "./gdf";
import { ConversionRecipe, REJECTED_TRIAL_CODE, validateRecipe } from "./recipes";

/** Common shape the GDF and CSV readers are reduced to before epoching. */
export interface SourceRecording {
  origin: string;
  fsHz: number;
  channelNames: string[];
  /** One array per channel, full recording length. */
  channels: Float64Array[];
  events: {
    /** 0-based sample index. */
    position: number;
    /** Numeric event code, for GDF sources and coded CSV markers. */
    type?: number;
    /** Class name, for named CSV markers. */
    marker?: string;
    durationSamples?: number;
  }[];
}

export interface ConvertOptions {
  keepRejected?: boolean;
  subjectId?: string;
}

/**
 * Match a recipe channel name against a source label. Dataset files
 * prefix electrode names ("EEG-C3", "EEG:C3"), so a label matches when
 * it equals the wanted name or contains it as a full separator-delimited
 * token; "FC3" must not match "C3".
 */
export function channelMatches(sourceLabel: string, wanted: string): boolean {
  const label = sourceLabel.trim().toLowerCase();
  const target = wanted.trim().toLowerCase();
  if (label === target) {
    return true;
  }
  return label.split(/[^a-z0-9]+/).includes(target);
}

function resolveChannels(rec: SourceRecording, recipe: ConversionRecipe): number[] {
  const indices: number[] = [];
  for (const wanted of recipe.channels) {
    const matches = rec.channelNames
      .map((label, i) => ({ label, i }))
      .filter(({ label }) => channelMatches(label, wanted));
    if (matches.length === 0) {
      throw new Error(
        `channel ${wanted} not found in source (have: ${rec.channelNames.join(", ")})`
      );
    }
    if (matches.length > 1) {
      throw new Error(
        `channel ${wanted} is ambiguous in source: ` +
          matches.map((m) => m.label).join(", ")
      );
    }
    indices.push(matches[0].i);
  }
  return indices;
}

function classOf(
  event: SourceRecording["events"][number],
  recipe: ConversionRecipe
): string | undefined {
  if (event.marker !== undefined) {
    return event.marker;
  }
  if (event.type !== undefined) {
    return recipe.eventClassByCode[event.type];
  }
  return undefined;
}

/**
 * A rejection marker covers a cue either through its explicit duration
 * or, for duration-free tables, when the cue follows it within one
 * trial length (the marker sits at the trial start, before the cue).
 */
const REJECT_LOOKBACK_S = 5.0;

function rejectedCues(rec: SourceRecording, cuePositions: number[]): Set<number> {
  const rejected = new Set<number>();
  const lookback = Math.round(REJECT_LOOKBACK_S * rec.fsHz);
  for (const event of rec.events) {
    if (event.type !== REJECTED_TRIAL_CODE) {
      continue;
    }
    for (const cue of cuePositions) {
      const covered =
        event.durationSamples && event.durationSamples > 0
          ? cue >= event.position && cue < event.position + event.durationSamples
          : cue >= event.position && cue - event.position <= lookback;
      if (covered) {
        rejected.add(cue);
      }
    }
  }
  return rejected;
}

export function epochRecording(
  rec: SourceRecording,
  recipe: ConversionRecipe,
  options: ConvertOptions = {}
): EpochSet {
  validateRecipe(recipe);
  const channelIdx = resolveChannels(rec, recipe);
  const cueSample = Math.round(recipe.tPreS * rec.fsHz);
  const nSamples = cueSample + Math.round(recipe.tPostS * rec.fsHz);

  const cues = rec.events
    .map((event) => ({ position: event.position, label: classOf(event, recipe) }))
    .filter((cue): cue is { position: number; label: string } => cue.label !== undefined)
    .sort((a, b) => a.position - b.position);
  if (cues.length === 0) {
    const codes = Object.keys(recipe.eventClassByCode).join(", ");
    throw new Error(`no cue events found (recipe maps codes: ${codes})`);
  }

  const rejected = options.keepRejected
    ? new Set<number>()
    : rejectedCues(rec, cues.map((c) => c.position));
  const kept = cues.filter((cue) => !rejected.has(cue.position));
  if (kept.length === 0) {
    throw new Error("every cue event is covered by a rejection marker");
  }

  const recordingLength = rec.channels[0].length;
  const data = new Float32Array(kept.length * channelIdx.length * nSamples);
  const labels: string[] = [];
  for (let t = 0; t < kept.length; t++) {
    const start = kept[t].position - cueSample;
    if (start < 0 || start + nSamples > recordingLength) {
      throw new Error(
        `trial ${t} window [${start}, ${start + nSamples}) falls outside the ` +
          `recording (${recordingLength} samples); cue at sample ${kept[t].position}`
      );
    }
    labels.push(kept[t].label);
    for (let c = 0; c < channelIdx.length; c++) {
      const source = rec.channels[channelIdx[c]];
      const base = (t * channelIdx.length + c) * nSamples;
      for (let k = 0; k < nSamples; k++) {
        data[base + k] = source[start + k];
      }
    }
  }

  return {
    subjectId: options.subjectId ?? path.parse(rec.origin).name,
    fsHz: rec.fsHz,
    channelNames: [...recipe.channels],
    labels,
    cueSample,
    nTrials: kept.length,
    nChannels: channelIdx.length,
    nSamples,
    data,
  };
}

export function gdfToSource(origin: string, gdf: GdfRecording): SourceRecording {
  return {
    origin,
    fsHz: gdf.signals.length > 0 ? gdf.signals[0].samplingRateHz : 0,
    channelNames: gdf.signals.map((s) => s.label),
    channels: gdf.samples,
    events: gdf.events,
  };
}

/** Read, epoch, and write one source file. Returns the manifest path. */
export function convert(
  sourcePath: string,
  recipe: ConversionRecipe,
  outDir: string,
  options: ConvertOptions = {}
): string {
  let source: SourceRecording;
  if (sourcePath.toLowerCase().endsWith(".csv")) {
    source = readCsvRecording(sourcePath);
  } else {
    const gdf = readGdf(sourcePath);
    source = gdfToSource(sourcePath, gdf);
    // The recipe channels carry one sampling rate; mixed-rate extra
    // signals (EOG at a lower rate) are fine as long as the selected
    // channels agree.
    const picked = resolveChannels(source, recipe);
    const rates = new Set(picked.map((i) => gdf.signals[i].samplingRateHz));
    if (rates.size > 1) {
      throw new Error(
        `selected channels have mixed sampling rates: ${[...rates].join(", ")}`
      );
    }
    source.fsHz = gdf.signals[picked[0]].samplingRateHz;
  }
  const set = epochRecording(source, recipe, options);
  return writeEpochSet(set, outDir);
}
