#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FAMILIES } from "./families.js";
import { renderFigure } from "./render.js";

export async function main(argv: string[]): Promise<number> {
  let failed = false;
  const parser = yargs(argv)
    .scriptName("risbeam-figures")
    .command(
      "render",
      "render one sweep family from a summary CSV to an SVG figure",
      (y) =>
        y
          .option("family", {
            type: "string",
            demandOption: true,
            choices: Object.keys(FAMILIES),
            describe: "sweep family to plot",
          })
          .option("in", {
            type: "string",
            demandOption: true,
            describe: "summary CSV produced by the simulator",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output SVG path",
          }),
      (args) => {
        renderFigure({ family: args.family, input: args.in, output: args.out });
        console.log(args.out);
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(err ? `error: ${err.message}` : `error: ${msg}`);
      failed = true;
    });
  await parser.parseAsync();
  return failed ? 1 : 0;
}

const isMain = process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isMain) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
