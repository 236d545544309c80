import { writeFile } from "node:fs/promises";

import { DevkitError } from "./errors.js";
import { FeatureSource, resolveFeatures } from "./features.js";
import { Metric, buildRdmMatrix } from "./rdm.js";

export const FORMAT_VERSION = "1.0";

export const TRACK_SUB_TARGETS: Record<string, readonly string[]> = {
  fmri: ["EVC", "IT"],
  meg: ["early", "late"],
};

export interface RdmDocument {
  format_version: string;
  track: string;
  condition_ids: string[];
  targets: Record<string, number[][]>;
}

function checkConditionIds(conditionIds: string[]): void {
  if (conditionIds.length < 3) {
    throw new DevkitError(
      `need at least 3 conditions, got ${conditionIds.length}`,
      "too_few_conditions",
    );
  }
  const seen = new Set<string>();
  for (const id of conditionIds) {
    if (seen.has(id)) {
      throw new DevkitError(`duplicate condition id ${JSON.stringify(id)}`, "duplicate_condition");
    }
    seen.add(id);
  }
}

/**
 * Build one RDM per sub-target from feature vectors and assemble the
 * submission document. `sources` must map every sub-target of the track
 * (and nothing else) to its own feature source; which model layer feeds
 * which sub-target is the caller's choice.
 */
export async function extractRdms(
  track: string,
  sources: Record<string, FeatureSource>,
  conditionIds: string[],
  metric: Metric = "one-minus-pearson",
): Promise<RdmDocument> {
  const subTargets = TRACK_SUB_TARGETS[track];
  if (!subTargets) {
    throw new DevkitError(`unknown track ${JSON.stringify(track)}`, "unknown_track");
  }
  const given = Object.keys(sources).sort();
  const wanted = [...subTargets].sort();
  if (given.length !== wanted.length || given.some((g, i) => g !== wanted[i])) {
    throw new DevkitError(
      `track ${track} needs sources for exactly ${JSON.stringify(wanted)}, got ${JSON.stringify(given)}`,
      "wrong_sub_targets",
    );
  }
  checkConditionIds(conditionIds);

  const targets: Record<string, number[][]> = {};
  for (const name of subTargets) {
    const vectors = await resolveFeatures(sources[name], conditionIds);
    targets[name] = buildRdmMatrix(vectors, conditionIds, metric);
  }
  return {
    format_version: FORMAT_VERSION,
    track,
    condition_ids: [...conditionIds],
    targets,
  };
}

/** JSON text: one matrix row per line, numbers as their shortest round-trip form. */
export function serializeRdmDocument(doc: RdmDocument): string {
  const lines: string[] = [];
  lines.push("{");
  lines.push(`  "format_version": ${JSON.stringify(doc.format_version)},`);
  lines.push(`  "track": ${JSON.stringify(doc.track)},`);
  lines.push(`  "condition_ids": ${JSON.stringify(doc.condition_ids)},`);
  lines.push('  "targets": {');
  const names = Object.keys(doc.targets);
  names.forEach((name, t) => {
    lines.push(`    ${JSON.stringify(name)}: [`);
    const rows = doc.targets[name];
    rows.forEach((row, i) => {
      const tail = i + 1 < rows.length ? "," : "";
      lines.push(`      [${row.map((x) => JSON.stringify(x)).join(", ")}]${tail}`);
    });
    lines.push(`    ]${t + 1 < names.length ? "," : ""}`);
  });
  lines.push("  }");
  lines.push("}");
  return lines.join("\n") + "\n";
}

export async function writeRdmFile(path: string, doc: RdmDocument): Promise<void> {
  await writeFile(path, serializeRdmDocument(doc), "utf8");
}
