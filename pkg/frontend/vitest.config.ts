import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // the live round-trip test spawns a real server process
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
