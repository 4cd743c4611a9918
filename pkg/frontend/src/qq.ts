/** Parser for the validate subcommand's qq.json records. */

import { SchemaError } from "./csv";

export interface QqFile {
  comparison: string;
  levels: number[];
  qA: number[];
  qB: number[];
  labelA: string;
  labelB: string;
  evalTime?: number;
  endpointPair?: [number, number];
}

function numberArray(value: unknown, name: string, source: string): number[] {
  if (!Array.isArray(value) || value.length === 0 || !value.every((v) => typeof v === "number" && Number.isFinite(v))) {
    throw new SchemaError(`${source}: "${name}" must be a nonempty array of finite numbers`);
  }
  return value as number[];
}

export function parseQqJson(text: string, source = "qq.json"): QqFile {
  let raw: any;
  try {
    raw = JSON.parse(text);
  } catch (e: any) {
    throw new SchemaError(`${source}: not valid JSON (${e.message})`);
  }
  const levels = numberArray(raw.levels, "levels", source);
  const qA = numberArray(raw.q_wce, "q_wce", source);
  const qB = numberArray(raw.q_baseline, "q_baseline", source);
  if (qA.length !== qB.length || qA.length !== levels.length) {
    throw new SchemaError(
      `${source}: mismatched array lengths (levels=${levels.length}, q_wce=${qA.length}, q_baseline=${qB.length})`
    );
  }
  return {
    comparison: typeof raw.comparison === "string" ? raw.comparison : "qq",
    levels,
    qA,
    qB,
    labelA: typeof raw.label_a === "string" ? raw.label_a : "a",
    labelB: typeof raw.label_b === "string" ? raw.label_b : "b",
    evalTime: typeof raw.eval_time === "number" ? raw.eval_time : undefined,
    endpointPair: Array.isArray(raw.endpoint_pair) ? (raw.endpoint_pair as [number, number]) : undefined,
  };
}
