import { readFile } from "node:fs/promises";

import { ApiErrorDetail, DevkitError, apiErrorFor } from "./errors.js";

export interface SubTargetScore {
  raw_r2: number;
  ceiling_r2: number;
  normalized_pct: number;
  degenerate: boolean;
}

export interface ScoreRecord {
  submission_id: string;
  track: string;
  sub_targets: Record<string, SubTargetScore>;
  track_score_pct: number;
}

export interface SubmitOptions {
  /** Confirmation that no test-set responses were used in training. Defaults to true. */
  attestation?: boolean;
  reportUrl?: string;
  /** Override the track named inside the file. */
  track?: string;
}

async function bodyOf(response: Response): Promise<ApiErrorDetail> {
  try {
    const parsed = (await response.json()) as { error?: ApiErrorDetail };
    return parsed.error ?? {};
  } catch {
    return {};
  }
}

/**
 * POST an RDM file to a running scoring service and return the parsed
 * score. Non-2xx responses become typed errors: BadRequest (400),
 * Unauthorized (401), Forbidden (403), QuotaExceeded (429, carries
 * retryAfterUtc), ApiError otherwise, each keeping the server's error
 * code and message verbatim.
 */
export async function submitRdms(
  file: string,
  serverUrl: string,
  token?: string,
  options: SubmitOptions = {},
): Promise<ScoreRecord> {
  const auth = token ?? process.env.ALGONAUTS_TOKEN;
  if (!auth) {
    throw new DevkitError("no token given and ALGONAUTS_TOKEN is not set", "missing_token");
  }
  const doc = JSON.parse(await readFile(file, "utf8")) as { track?: string };
  const body: Record<string, unknown> = {
    track: options.track ?? doc.track,
    attestation: options.attestation ?? true,
    rdm_file: doc,
  };
  if (options.reportUrl !== undefined) body.report_url = options.reportUrl;

  const response = await fetch(`${serverUrl.replace(/\/+$/, "")}/api/v1/submissions`, {
    method: "POST",
    headers: {
      "content-type": "application/json",
      authorization: `Bearer ${auth}`,
    },
    body: JSON.stringify(body),
  });
  if (response.status === 201) {
    return (await response.json()) as ScoreRecord;
  }
  throw apiErrorFor(response.status, await bodyOf(response));
}
