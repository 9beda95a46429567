export { parseCsvRecording, readCsvRecording } from "./csv";
export {
  channelMatches,
  convert,
  epochRecording,
  gdfToSource,
  type ConvertOptions,
  type SourceRecording,
} from "./convert";
export {
  readEpochSet,
  validateEpochSet,
  writeEpochSet,
  type EpochSet,
} from "./epochset";
export { parseGdf, readGdf, type GdfEvent, type GdfRecording, type GdfSignal } from "./gdf";
export {
  EVENT_CODE_NAMES,
  RECIPES,
  REJECTED_TRIAL_CODE,
  recipeFor,
  validateRecipe,
  type ConversionRecipe,
  type DatasetTag,
} from "./recipes";
export { summarize } from "./summarize";
