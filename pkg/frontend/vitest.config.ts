import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    // the e2e file boots a real service process
    testTimeout: 120_000,
    hookTimeout: 60_000,
  },
});
