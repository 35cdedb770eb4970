#!/usr/bin/env node
/**
 * qlsfi-plot: render figures from QLS1 result containers.
 *
 * Usage:
 *   qlsfi-plot <joint|pes-compare|photon-dist> --input a.qls1 [--input b.qls1]
 *              --output fig.svg [--e-min X] [--e-max X] [--linear]
 *              [--per-fock n1,n2,...] [--label NAME]...
 *
 * Exit codes: 0 success, 2 usage error, 4 container/format/IO error.
 */

import * as fs from "fs";

import { ContainerFormatError } from "./container";
import { FigureKind, defaultSpec, renderFigure } from "./render";

export class UsageError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "UsageError";
  }
}

const KINDS: FigureKind[] = ["joint", "pes-compare", "photon-dist"];

export function parseArgs(argv: string[]) {
  if (argv.length === 0) {
    throw new UsageError(
      `figure kind required: one of ${KINDS.join(", ")}`
    );
  }
  const kind = argv[0] as FigureKind;
  if (!KINDS.includes(kind)) {
    throw new UsageError(`unknown figure kind '${argv[0]}'`);
  }
  const spec = defaultSpec(kind, [], "");
  let i = 1;
  const need = (flag: string): string => {
    if (i + 1 >= argv.length) {
      throw new UsageError(`${flag} requires a value`);
    }
    i += 1;
    return argv[i];
  };
  const needNumber = (flag: string): number => {
    const v = Number(need(flag));
    if (!Number.isFinite(v)) {
      throw new UsageError(`${flag} requires a number`);
    }
    return v;
  };
  for (; i < argv.length; i++) {
    switch (argv[i]) {
      case "--input":
        spec.inputs.push(need("--input"));
        break;
      case "--output":
        spec.output = need("--output");
        break;
      case "--label":
        spec.labels.push(need("--label"));
        break;
      case "--e-min":
        spec.eMin = needNumber("--e-min");
        break;
      case "--e-max":
        spec.eMax = needNumber("--e-max");
        break;
      case "--linear":
        spec.logScale = false;
        break;
      case "--per-fock": {
        const raw = need("--per-fock");
        spec.perFock = raw.split(",").map((s) => {
          const n = Number(s);
          if (!Number.isInteger(n) || n < 0) {
            throw new UsageError(`--per-fock entries must be photon numbers, got '${s}'`);
          }
          return n;
        });
        break;
      }
      default:
        throw new UsageError(`unknown argument '${argv[i]}'`);
    }
  }
  if (spec.inputs.length === 0) {
    throw new UsageError("--input is required");
  }
  if (spec.output === "") {
    throw new UsageError("--output is required");
  }
  if (spec.perFock !== null && spec.kind !== "pes-compare") {
    throw new UsageError("--per-fock applies only to pes-compare");
  }
  return spec;
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const svg = renderFigure(spec);
    fs.writeFileSync(spec.output, svg, "utf-8");
    process.stdout.write(`wrote ${spec.output}\n`);
    return 0;
  } catch (exc) {
    if (exc instanceof UsageError) {
      process.stderr.write(`usage error: ${exc.message}\n`);
      return 2;
    }
    if (exc instanceof ContainerFormatError) {
      process.stderr.write(`container error: ${exc.message}\n`);
      return 4;
    }
    throw exc;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
