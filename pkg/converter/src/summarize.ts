/** Human-readable report of what a source recording contains. */

import * as fs from "fs";
import * as path from "path";
import { readCsvRecording } from "./csv";
import { readGdf } from "./gdf";
import { EVENT_CODE_NAMES } from "./recipes";

function countBy<T>(items: T[], key: (item: T) => string): Map<string, number> {
  const counts = new Map<string, number>();
  for (const item of items) {
    const k = key(item);
    counts.set(k, (counts.get(k) ?? 0) + 1);
  }
  return counts;
}

function summarizeGdf(sourcePath: string): string {
  const gdf = readGdf(sourcePath, false);
  const lines: string[] = [];
  lines.push(`${gdf.version} recording: ${path.basename(sourcePath)}`);
  const rates = [...new Set(gdf.signals.map((s) => s.samplingRateHz))];
  lines.push(`sampling rate: ${rates.map((r) => `${r} Hz`).join(", ")}`);
  lines.push(`signals: ${gdf.signals.length}`);
  lines.push(`channels: ${gdf.signals.map((s) => s.label).join(", ")}`);
  lines.push(
    `records: ${gdf.recordCount} x ${gdf.recordDurationS} s ` +
      `(${gdf.recordCount * gdf.recordDurationS} s total)`
  );
  lines.push(`events: ${gdf.events.length}`);
  const byCode = [...countBy(gdf.events, (e) => String(e.type)).entries()].sort(
    (a, b) => Number(a[0]) - Number(b[0])
  );
  for (const [code, count] of byCode) {
    const name = EVENT_CODE_NAMES[Number(code)];
    lines.push(`  ${code}${name ? ` (${name})` : ""}: ${count}`);
  }
  return lines.join("\n");
}

function summarizeCsv(sourcePath: string): string {
  const rec = readCsvRecording(sourcePath);
  const lines: string[] = [];
  lines.push(`CSV recording: ${path.basename(sourcePath)}`);
  lines.push(`sampling rate: ${rec.fsHz} Hz`);
  lines.push(`channels (${rec.channelNames.length}): ${rec.channelNames.join(", ")}`);
  lines.push(`samples per channel: ${rec.channels[0].length}`);
  lines.push(`markers: ${rec.events.length}`);
  const byMarker = [
    ...countBy(rec.events, (e) => e.marker ?? String(e.type)).entries(),
  ].sort();
  for (const [marker, count] of byMarker) {
    lines.push(`  ${marker}: ${count}`);
  }
  return lines.join("\n");
}

export function summarize(sourcePath: string): string {
  if (!fs.existsSync(sourcePath)) {
    throw new Error(`cannot read ${sourcePath}: no such file`);
  }
  return sourcePath.toLowerCase().endsWith(".csv")
    ? summarizeCsv(sourcePath)
    : summarizeGdf(sourcePath);
}
