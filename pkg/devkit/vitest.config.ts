import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // the client suite boots the real scoring service in a child process
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
