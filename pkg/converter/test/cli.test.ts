import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterAll, afterEach, beforeAll, beforeEach, describe, expect, it, vi } from "vitest";
import { main } from "../src/cli";
import { buildIv2bSession } from "./fixtures";

let tmp: string;
let sourcePath: string;
let stdout: ReturnType<typeof vi.spyOn>;
let stderr: ReturnType<typeof vi.spyOn>;

beforeAll(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "cli-test-"));
  sourcePath = path.join(tmp, "B0403T.gdf");
  fs.writeFileSync(
    sourcePath,
    buildIv2bSession({ trialsPerClass: 2, rejectTrials: [0], seed: 30 }).buffer
  );
});

afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

beforeEach(() => {
  stdout = vi.spyOn(process.stdout, "write").mockImplementation(() => true);
  stderr = vi.spyOn(process.stderr, "write").mockImplementation(() => true);
});

afterEach(() => {
  stdout.mockRestore();
  stderr.mockRestore();
});

function printed(spy: ReturnType<typeof vi.spyOn>): string {
  return spy.mock.calls.map((c) => String(c[0])).join("");
}

describe("convert command", () => {
  it("writes an epoch set and reports the manifest path", async () => {
    const out = path.join(tmp, "out1");
    const code = await main(["convert", "--dataset", "iv2b", "--in", sourcePath, "--out", out]);
    expect(code).toBe(0);
    expect(printed(stdout)).toContain(`wrote ${path.join(out, "manifest.json")}`);
    const manifest = JSON.parse(fs.readFileSync(path.join(out, "manifest.json"), "utf8"));
    expect(manifest.n_trials).toBe(3); // one of four trials is rejected
    expect(manifest.subject_id).toBe("B0403T");
  });

  it("honors channel, window, and subject overrides", async () => {
    const out = path.join(tmp, "out2");
    const code = await main([
      "convert",
      "--dataset", "iv2b",
      "--in", sourcePath,
      "--out", out,
      "--keep-rejected",
      "--channels", "C3",
      "--pre", "1",
      "--post", "2",
      "--subject-id", "B04",
    ]);
    expect(code).toBe(0);
    const manifest = JSON.parse(fs.readFileSync(path.join(out, "manifest.json"), "utf8"));
    expect(manifest.n_trials).toBe(4);
    expect(manifest.channel_names).toEqual(["C3"]);
    expect(manifest.cue_sample).toBe(250);
    expect(manifest.n_samples).toBe(750);
    expect(manifest.subject_id).toBe("B04");
  });

  it("fails with a message when the source is unreadable", async () => {
    const code = await main([
      "convert",
      "--dataset", "iv2b",
      "--in", path.join(tmp, "absent.gdf"),
      "--out", path.join(tmp, "out3"),
    ]);
    expect(code).toBe(1);
    expect(printed(stderr)).toMatch(/error: cannot read/);
  });

  it("rejects an unknown dataset tag", async () => {
    const code = await main([
      "convert",
      "--dataset", "iv9z",
      "--in", sourcePath,
      "--out", path.join(tmp, "out4"),
    ]);
    expect(code).toBe(1);
  });
});

describe("summarize command", () => {
  it("prints the recording description", async () => {
    const code = await main(["summarize", sourcePath]);
    expect(code).toBe(0);
    const text = printed(stdout);
    expect(text).toContain("GDF 1.25 recording: B0403T.gdf");
    expect(text).toContain("EEG:C3");
  });
});

describe("argument validation", () => {
  it("demands a command", async () => {
    expect(await main([])).toBe(1);
    expect(printed(stderr)).toContain("give a command");
  });

  it("rejects unknown commands", async () => {
    expect(await main(["frobnicate"])).toBe(1);
  });

  it("requires the mandatory convert options", async () => {
    expect(await main(["convert", "--dataset", "iv2b"])).toBe(1);
  });
});
