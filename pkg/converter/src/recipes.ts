/** Built-in conversion recipes and their validation. */

export type DatasetTag = "iv2a" | "iv2b" | "csv-generic";

export interface ConversionRecipe {
  datasetTag: DatasetTag;
  /** Cue event code -> class name. Ignored for named CSV markers. */
  eventClassByCode: Record<number, string>;
  /** Epoch window relative to the cue, seconds. */
  tPreS: number;
  tPostS: number;
  /** Channel names to keep, in output order. */
  channels: string[];
}

/** Event code marking a trial the dataset authors flagged for rejection. */
export const REJECTED_TRIAL_CODE = 1023;

/** Human-readable names for the event codes these datasets use. */
export const EVENT_CODE_NAMES: Record<number, string> = {
  276: "eyes open",
  277: "eyes closed",
  768: "trial start",
  769: "cue left",
  770: "cue right",
  771: "cue feet",
  772: "cue tongue",
  781: "feedback onset",
  783: "cue unknown",
  1023: "rejected trial",
  1077: "horizontal eye movement",
  1078: "vertical eye movement",
  1079: "eye rotation",
  1081: "eye blinks",
  32766: "start of a new run",
};

const MOTOR_CHANNELS = ["C3", "Cz", "C4"];

export const RECIPES: Record<DatasetTag, ConversionRecipe> = {
  iv2a: {
    datasetTag: "iv2a",
    eventClassByCode: { 769: "left", 770: "right", 771: "feet", 772: "tongue" },
    tPreS: 3.0,
    tPostS: 4.0,
    channels: [...MOTOR_CHANNELS],
  },
  iv2b: {
    datasetTag: "iv2b",
    eventClassByCode: { 769: "left", 770: "right" },
    tPreS: 3.0,
    tPostS: 4.0,
    channels: [...MOTOR_CHANNELS],
  },
  "csv-generic": {
    datasetTag: "csv-generic",
    eventClassByCode: { 769: "left", 770: "right" },
    tPreS: 3.0,
    tPostS: 4.0,
    channels: [...MOTOR_CHANNELS],
  },
};

export function validateRecipe(recipe: ConversionRecipe): void {
  if (recipe.tPreS < 0) {
    throw new Error(`recipe t_pre must be >= 0, got ${recipe.tPreS}`);
  }
  if (recipe.tPostS <= 0) {
    throw new Error(`recipe t_post must be > 0, got ${recipe.tPostS}`);
  }
  if (recipe.channels.length === 0) {
    throw new Error("recipe channel subset is empty");
  }
  const seen = new Set<string>();
  for (const name of recipe.channels) {
    if (seen.has(name)) {
      throw new Error(`recipe channel subset repeats ${name}`);
    }
    seen.add(name);
  }
}

export function recipeFor(
  tag: DatasetTag,
  overrides: Partial<Pick<ConversionRecipe, "tPreS" | "tPostS" | "channels">> = {}
): ConversionRecipe {
  const base = RECIPES[tag];
  if (!base) {
    throw new Error(`unknown dataset tag "${tag}"`);
  }
  const recipe = { ...base, channels: [...base.channels], ...overrides };
  validateRecipe(recipe);
  return recipe;
}
