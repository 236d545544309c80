import { spawnSync } from "node:child_process";
import { mkdtemp, readFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { Metric, RdmDocument, extractRdms, writeRdmFile } from "../src/index.js";

// shared with the scoring package; tests/test_fixtures.py pins the other side
const FIXTURES = fileURLToPath(new URL("../../fixtures", import.meta.url));

interface Case {
  expected: string;
  track: string;
  layers: Record<string, string>;
  metric: Metric;
}

const CASES: Case[] = [
  {
    expected: "expected_fmri.json",
    track: "fmri",
    layers: { EVC: "evc_layer", IT: "it_layer" },
    metric: "one-minus-pearson",
  },
  {
    expected: "expected_fmri_euclidean.json",
    track: "fmri",
    layers: { EVC: "evc_layer", IT: "it_layer" },
    metric: "euclidean",
  },
  {
    expected: "expected_meg.json",
    track: "meg",
    layers: { early: "early_layer", late: "late_layer" },
    metric: "one-minus-pearson",
  },
];

async function extractFromFixtures(c: Case): Promise<RdmDocument> {
  const expected = JSON.parse(
    await readFile(join(FIXTURES, c.expected), "utf8"),
  ) as RdmDocument;
  const sources = Object.fromEntries(
    Object.entries(c.layers).map(([target, layer]) => [target, join(FIXTURES, "features", layer)]),
  );
  const doc = await extractRdms(c.track, sources, expected.condition_ids, c.metric);
  return doc;
}

describe("cross-boundary agreement", () => {
  for (const c of CASES) {
    it(`matches the scoring package to 1e-9 (${c.expected})`, async () => {
      const expected = JSON.parse(
        await readFile(join(FIXTURES, c.expected), "utf8"),
      ) as RdmDocument;
      const doc = await extractFromFixtures(c);
      expect(Object.keys(doc.targets).sort()).toEqual(Object.keys(expected.targets).sort());
      let worst = 0;
      for (const [name, matrix] of Object.entries(expected.targets)) {
        const got = doc.targets[name];
        for (let i = 0; i < matrix.length; i++) {
          for (let j = 0; j < matrix.length; j++) {
            worst = Math.max(worst, Math.abs(got[i][j] - matrix[i][j]));
          }
        }
      }
      expect(worst).toBeLessThanOrEqual(1e-9);
    });

    it(`output file passes the reference validator (${c.expected})`, async () => {
      const doc = await extractFromFixtures(c);
      const dir = await mkdtemp(join(tmpdir(), "devkit-"));
      const path = join(dir, "out.json");
      await writeRdmFile(path, doc);
      const result = spawnSync("rsabench", ["validate", path], { encoding: "utf8" });
      expect(result.error).toBeUndefined();
      expect(result.status, result.stdout + result.stderr).toBe(0);
      expect(result.stdout).toContain("parse        pass");
      expect(result.stdout).toContain("finiteness   pass");
    });
  }
});
