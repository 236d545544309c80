export {
  ApiError,
  ApiErrorDetail,
  BadRequest,
  DevkitError,
  Forbidden,
  MissingCondition,
  NonFiniteFeature,
  QuotaExceeded,
  RaggedVectors,
  Unauthorized,
  ZeroVarianceVector,
} from "./errors.js";
export { FeatureSource, resolveFeatures } from "./features.js";
export { METRICS, Metric, buildRdmMatrix } from "./rdm.js";
export {
  FORMAT_VERSION,
  RdmDocument,
  TRACK_SUB_TARGETS,
  extractRdms,
  serializeRdmDocument,
  writeRdmFile,
} from "./extract.js";
export { ScoreRecord, SubTargetScore, SubmitOptions, submitRdms } from "./client.js";
