import { basename } from "node:path";
import { parseArgs } from "node:util";

import { MissingColumnError } from "./csv";
import { GroupColumn, render } from "./figure";

const USAGE = "usage: figgen --csv PATH --group-by lambda|mu --out PATH.svg [--title TEXT]";

export function main(argv: string[]): number {
  let values: { csv?: string; "group-by"?: string; out?: string; title?: string };
  try {
    values = parseArgs({
      args: argv,
      options: {
        csv: { type: "string" },
        "group-by": { type: "string" },
        out: { type: "string" },
        title: { type: "string" },
      },
    }).values;
  } catch (err) {
    console.error((err as Error).message);
    console.error(USAGE);
    return 2;
  }

  const csv = values.csv;
  const groupBy = values["group-by"];
  const out = values.out;
  if (csv === undefined || groupBy === undefined || out === undefined) {
    console.error(USAGE);
    return 2;
  }
  if (groupBy !== "lambda" && groupBy !== "mu") {
    console.error(`--group-by must be "lambda" or "mu", got "${groupBy}"`);
    console.error(USAGE);
    return 2;
  }

  try {
    const result = render({
      csvPath: csv,
      groupBy: groupBy as GroupColumn,
      outPath: out,
      title: values.title ?? basename(csv).replace(/\.csv$/, ""),
    });
    process.stdout.write(result.report);
    console.error(`wrote ${result.svgPath} and ${result.reportPath}`);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError) {
      console.error(`figgen: error: missing column: ${err.column}`);
    } else {
      console.error(`figgen: error: ${(err as Error).message}`);
    }
    return 1;
  }
}
