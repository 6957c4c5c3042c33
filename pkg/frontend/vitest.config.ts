import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    // the e2e suite boots the real service and renders real tiles
    testTimeout: 180_000,
    hookTimeout: 180_000,
    pool: "forks",
  },
});
