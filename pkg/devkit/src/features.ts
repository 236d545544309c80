import { readFile } from "node:fs/promises";
import { join } from "node:path";

import { MissingCondition, NonFiniteFeature, RaggedVectors } from "./errors.js";

/**
 * Where feature vectors come from: a directory holding one plain-text file
 * per condition (filename = condition id, optionally with a .txt suffix,
 * whitespace-separated decimals), or a callable that maps a condition id
 * to its vector.
 */
export type FeatureSource =
  | string
  | ((conditionId: string) => number[] | Promise<number[]>);

async function readVectorFile(dir: string, conditionId: string): Promise<number[]> {
  let text: string | undefined;
  for (const candidate of [join(dir, conditionId), join(dir, conditionId + ".txt")]) {
    try {
      text = await readFile(candidate, "utf8");
      break;
    } catch (err) {
      if ((err as NodeJS.ErrnoException).code !== "ENOENT") throw err;
    }
  }
  if (text === undefined) {
    throw new MissingCondition(conditionId, `no file named for it under ${dir}`);
  }
  const tokens = text.trim().split(/\s+/);
  if (tokens.length === 1 && tokens[0] === "") {
    throw new MissingCondition(conditionId, "feature file is empty");
  }
  return tokens.map((tok) => Number(tok));
}

export async function resolveFeatures(
  source: FeatureSource,
  conditionIds: string[],
): Promise<number[][]> {
  const vectors: number[][] = [];
  for (const conditionId of conditionIds) {
    const v =
      typeof source === "string"
        ? await readVectorFile(source, conditionId)
        : await source(conditionId);
    if (!Array.isArray(v) || v.length === 0) {
      throw new MissingCondition(conditionId, "source produced no vector");
    }
    if (!v.every((x) => typeof x === "number" && Number.isFinite(x))) {
      throw new NonFiniteFeature(conditionId);
    }
    if (vectors.length > 0 && v.length !== vectors[0].length) {
      throw new RaggedVectors(
        `vector for ${JSON.stringify(conditionId)} has dimension ${v.length}, ` +
          `expected ${vectors[0].length} (from ${JSON.stringify(conditionIds[0])})`,
      );
    }
    vectors.push(v);
  }
  return vectors;
}
