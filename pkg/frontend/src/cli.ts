#!/usr/bin/env node
/** zeno-plot: render an experiment CSV to a standalone SVG. */

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath, pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { CsvParseError, parseCsv } from "./csv.js";
import { ColumnError, renderPlot, type Styles } from "./plot.js";
import { PRESET_NAMES, PRESET_SPECS } from "./presets.js";

const EXIT_OK = 0;
const EXIT_USAGE = 2;
const EXIT_DATA = 3;

const USAGE = `usage: zeno-plot <preset> --csv <file> [--out <file>] [--styles <file>]
       zeno-plot list

presets: ${PRESET_NAMES.join(", ")}`;

function loadStyles(path: string | undefined): Styles {
  const here = dirname(fileURLToPath(import.meta.url));
  const resolved = path ?? join(here, "..", "styles.json");
  return JSON.parse(readFileSync(resolved, "utf8")) as Styles;
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        csv: { type: "string" },
        out: { type: "string" },
        styles: { type: "string" },
      },
    });
  } catch (error) {
    process.stderr.write(`error: ${(error as Error).message}\n${USAGE}\n`);
    return EXIT_USAGE;
  }

  const [command] = parsed.positionals;
  if (command === "list") {
    process.stdout.write(PRESET_NAMES.join("\n") + "\n");
    return EXIT_OK;
  }
  if (command === undefined || !(command in PRESET_SPECS)) {
    process.stderr.write(
      `error: unknown preset "${command ?? ""}"\n${USAGE}\n`,
    );
    return EXIT_USAGE;
  }
  if (parsed.values.csv === undefined) {
    process.stderr.write(`error: --csv is required\n${USAGE}\n`);
    return EXIT_USAGE;
  }

  let text: string;
  try {
    text = readFileSync(parsed.values.csv, "utf8");
  } catch (error) {
    process.stderr.write(`error: ${(error as Error).message}\n`);
    return EXIT_USAGE;
  }

  try {
    const table = parseCsv(text);
    const svg = renderPlot(
      table,
      PRESET_SPECS[command],
      loadStyles(parsed.values.styles),
    );
    const out = parsed.values.out ?? `${command}.svg`;
    writeFileSync(out, svg, "utf8");
    process.stdout.write(`wrote ${out}\n`);
    return EXIT_OK;
  } catch (error) {
    if (error instanceof CsvParseError || error instanceof ColumnError) {
      process.stderr.write(`error: ${error.message}\n`);
      return EXIT_DATA;
    }
    throw error;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
