export class DevkitError extends Error {
  readonly code: string;

  constructor(message: string, code: string) {
    super(message);
    this.name = new.target.name;
    this.code = code;
  }
}

export class MissingCondition extends DevkitError {
  readonly conditionId: string;

  constructor(conditionId: string, detail: string) {
    super(`no features for condition ${JSON.stringify(conditionId)}: ${detail}`, "missing_condition");
    this.conditionId = conditionId;
  }
}

export class RaggedVectors extends DevkitError {
  constructor(message: string) {
    super(message, "ragged_vectors");
  }
}

export class ZeroVarianceVector extends DevkitError {
  readonly conditionId: string;

  constructor(conditionId: string) {
    super(
      `feature vector for ${JSON.stringify(conditionId)} is constant; ` +
        "correlation distance is undefined",
      "zero_variance_vector",
    );
    this.conditionId = conditionId;
  }
}

export class NonFiniteFeature extends DevkitError {
  constructor(conditionId: string) {
    super(`feature vector for ${JSON.stringify(conditionId)} has a non-finite value`, "non_finite_feature");
  }
}

/** Error body the service attaches to non-2xx responses. */
export interface ApiErrorDetail {
  code?: string;
  message?: string;
  cause_code?: string;
  row?: number;
  col?: number;
  retry_after_utc?: string;
}

export class ApiError extends DevkitError {
  readonly status: number;
  readonly detail: ApiErrorDetail;

  constructor(status: number, detail: ApiErrorDetail) {
    super(detail.message ?? `server returned HTTP ${status}`, detail.code ?? "http_error");
    this.status = status;
    this.detail = detail;
  }
}

export class BadRequest extends ApiError {}

export class Unauthorized extends ApiError {}

export class Forbidden extends ApiError {}

export class QuotaExceeded extends ApiError {
  readonly retryAfterUtc: string | undefined;

  constructor(status: number, detail: ApiErrorDetail) {
    super(status, detail);
    this.retryAfterUtc = detail.retry_after_utc;
  }
}

export function apiErrorFor(status: number, detail: ApiErrorDetail): ApiError {
  switch (status) {
    case 400:
      return new BadRequest(status, detail);
    case 401:
      return new Unauthorized(status, detail);
    case 403:
      return new Forbidden(status, detail);
    case 429:
      return new QuotaExceeded(status, detail);
    default:
      return new ApiError(status, detail);
  }
}
