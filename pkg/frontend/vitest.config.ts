import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    // Every test round-trips to a live service subprocess.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
