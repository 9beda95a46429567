#!/usr/bin/env node
/** Command line front-end: convert recordings, summarize their contents. */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { convert } from "./convert";
import { DatasetTag, recipeFor } from "./recipes";
import { summarize } from "./summarize";

const TAG_BY_FLAG: Record<string, DatasetTag> = {
  iv2a: "iv2a",
  iv2b: "iv2b",
  csv: "csv-generic",
};

export async function main(argv: string[]): Promise<number> {
  const parser = yargs(argv)
    .scriptName("epochset-convert")
    .command(
      "convert",
      "epoch one recording into an EpochSet directory",
      (cmd) =>
        cmd
          .option("dataset", {
            choices: Object.keys(TAG_BY_FLAG),
            demandOption: true,
            describe: "which built-in recipe to use",
          })
          .option("in", {
            type: "string",
            demandOption: true,
            describe: "source GDF or CSV file",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output directory for manifest.json + data.f32",
          })
          .option("keep-rejected", {
            type: "boolean",
            default: false,
            describe: "keep trials covered by rejection markers",
          })
          .option("pre", {
            type: "number",
            default: 3.0,
            describe: "seconds before the cue",
          })
          .option("post", {
            type: "number",
            default: 4.0,
            describe: "seconds after the cue",
          })
          .option("channels", {
            type: "string",
            describe: "comma-separated channel subset (default C3,Cz,C4)",
          })
          .option("subject-id", {
            type: "string",
            describe: "subject id for the manifest (default: file stem)",
          }),
      (args) => {
        const recipe = recipeFor(TAG_BY_FLAG[args.dataset as string], {
          tPreS: args.pre,
          tPostS: args.post,
          ...(args.channels
            ? { channels: args.channels.split(",").map((c) => c.trim()) }
            : {}),
        });
        const manifestPath = convert(args.in, recipe, args.out, {
          keepRejected: args.keepRejected,
          subjectId: args.subjectId,
        });
        process.stdout.write(`wrote ${manifestPath}\n`);
      }
    )
    .command(
      "summarize <in>",
      "print channels, rates, and event counts of a recording",
      (cmd) =>
        cmd.positional("in", {
          type: "string",
          demandOption: true,
          describe: "source GDF or CSV file",
        }),
      (args) => {
        process.stdout.write(summarize(args.in as string) + "\n");
      }
    )
    .demandCommand(1, "give a command: convert or summarize")
    .strict()
    .exitProcess(false)
    // A fail handler that returns would make yargs continue into the
    // command handler with invalid arguments; rethrowing routes every
    // failure through the single catch below.
    .fail((msg, err) => {
      throw err ?? new Error(msg ?? "unknown failure");
    })
    .help();
  try {
    await parser.parseAsync();
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
