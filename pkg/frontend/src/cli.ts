#!/usr/bin/env node
/**
 * plots render --kind {bridge-fan|qq} --in <files> --out <image>
 *              [--format png|svg] [--title <text>]
 *
 * bridge-fan consumes one paths CSV per truncation level (comma-separated),
 * qq consumes a single qq.json from the validate subcommand.  Output format
 * defaults to PNG; nothing is written unless rendering succeeds.
 */
import * as fs from "fs";
import * as path from "path";

import { parsePathsCsv, truncationLevel, SchemaError } from "./csv";
import { toSvg } from "./figure";
import { parseQqJson } from "./qq";
import { toPngBuffer } from "./raster";
import { bridgeFanFigure, qqFigure, FanInput } from "./render";

interface Args {
  kind: string;
  inputs: string[];
  out: string;
  format: string;
  title?: string;
}

function usage(): string {
  return "usage: plots render --kind {bridge-fan|qq} --in file[,file...] --out image [--format png|svg] [--title text]";
}

function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") throw new Error(`unknown command "${argv[0] ?? ""}"\n${usage()}`);
  const args: Partial<Args> = { format: "" };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--kind":
        args.kind = value;
        i++;
        break;
      case "--in":
        args.inputs = (value ?? "").split(",").filter((s) => s.length > 0);
        i++;
        break;
      case "--out":
        args.out = value;
        i++;
        break;
      case "--format":
        args.format = value;
        i++;
        break;
      case "--title":
        args.title = value;
        i++;
        break;
      default:
        throw new Error(`unknown flag "${flag}"\n${usage()}`);
    }
  }
  if (!args.kind || !args.inputs?.length || !args.out) throw new Error(usage());
  if (args.kind !== "bridge-fan" && args.kind !== "qq") {
    throw new Error(`--kind must be bridge-fan or qq, got "${args.kind}"`);
  }
  if (!args.format) {
    args.format = args.out.toLowerCase().endsWith(".svg") ? "svg" : "png";
  }
  if (args.format !== "png" && args.format !== "svg") {
    throw new Error(`--format must be png or svg, got "${args.format}"`);
  }
  return args as Args;
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e: any) {
    process.stderr.write(`${e.message}\n`);
    return 2;
  }
  try {
    let figure;
    if (args.kind === "bridge-fan") {
      const inputs: FanInput[] = args.inputs.map((fname) => {
        const file = parsePathsCsv(fs.readFileSync(fname, "utf-8"), path.basename(fname));
        return { file, level: truncationLevel(file, path.basename(fname)) };
      });
      figure = bridgeFanFigure(inputs, args.title);
    } else {
      if (args.inputs.length !== 1) throw new SchemaError("qq takes exactly one input file");
      const qq = parseQqJson(fs.readFileSync(args.inputs[0], "utf-8"), path.basename(args.inputs[0]));
      figure = qqFigure(qq, args.title);
    }
    const payload = args.format === "svg" ? Buffer.from(toSvg(figure), "utf-8") : toPngBuffer(figure);
    fs.writeFileSync(args.out, payload);
    process.stdout.write(`wrote ${args.out} (${payload.length} bytes)\n`);
    return 0;
  } catch (e: any) {
    process.stderr.write(`error: ${e.message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
