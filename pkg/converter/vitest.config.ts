import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // The full-session conversion test builds and epochs a ~58 MB
    // recording and shells out to the validator, so it needs headroom.
    testTimeout: 60_000,
    hookTimeout: 120_000,
  },
});
