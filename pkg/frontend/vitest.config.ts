import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // Each suite that needs a DOM opts into happy-dom with a pragma;
    // suites that spawn the backend need generous timeouts.
    environment: "node",
    testTimeout: 60_000,
    hookTimeout: 60_000,
    pool: "forks",
  },
});
