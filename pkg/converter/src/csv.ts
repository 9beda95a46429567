/**
 * Reader for the plain-CSV recording layout.
 *
 * Expected shape: a header row `time,<channel...>,marker` followed by one
 * row per sample. `time` is seconds, monotonically increasing at a fixed
 * rate. `marker` is empty except on cue rows, where it holds either a
 * class name ("left") or a numeric event code ("769"). The marker column
 * is optional for files that are only summarized, and may also be named
 * `event`; the time column may be named `t`.
 */

import * as fs from "fs";
import type { SourceRecording } from "./convert";

const TIME_NAMES = new Set(["time", "t"]);
const MARKER_NAMES = new Set(["marker", "event"]);

export function parseCsvRecording(text: string, origin: string): SourceRecording {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length < 3) {
    throw new Error(`${origin}: need a header row and at least 2 sample rows`);
  }
  const header = lines[0].split(",").map((cell) => cell.trim());
  if (!TIME_NAMES.has(header[0].toLowerCase())) {
    throw new Error(
      `${origin}: first column must be the time column (time or t), got "${header[0]}"`
    );
  }
  const hasMarker = MARKER_NAMES.has(header[header.length - 1].toLowerCase());
  const channelNames = header.slice(1, hasMarker ? header.length - 1 : header.length);
  if (channelNames.length === 0) {
    throw new Error(`${origin}: no channel columns between time and marker`);
  }

  const nRows = lines.length - 1;
  const times = new Float64Array(nRows);
  const channels = channelNames.map(() => new Float64Array(nRows));
  const events: SourceRecording["events"] = [];
  for (let r = 0; r < nRows; r++) {
    const cells = lines[r + 1].split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `${origin}: row ${r + 2} has ${cells.length} cells, header has ${header.length}`
      );
    }
    times[r] = Number(cells[0]);
    for (let c = 0; c < channelNames.length; c++) {
      const value = Number(cells[c + 1]);
      if (!Number.isFinite(value)) {
        throw new Error(
          `${origin}: non-numeric sample "${cells[c + 1]}" at row ${r + 2}, column ${channelNames[c]}`
        );
      }
      channels[c][r] = value;
    }
    if (hasMarker) {
      const marker = cells[cells.length - 1].trim();
      if (marker.length > 0) {
        if (/^\d+$/.test(marker)) {
          events.push({ position: r, type: Number(marker) });
        } else {
          events.push({ position: r, marker });
        }
      }
    }
  }

  const span = times[nRows - 1] - times[0];
  if (!(span > 0)) {
    throw new Error(`${origin}: time column does not increase`);
  }
  // Snap to 3 decimals so 0.008-second steps read back as exactly 125 Hz.
  const fsHz = Math.round(((nRows - 1) / span) * 1000) / 1000;
  return {
    origin,
    fsHz,
    channelNames,
    channels,
    events,
  };
}

export function readCsvRecording(path: string): SourceRecording {
  let text: string;
  try {
    text = fs.readFileSync(path, "utf8");
  } catch (err) {
    throw new Error(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseCsvRecording(text, path);
}
