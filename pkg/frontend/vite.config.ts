import { defineConfig } from "vitest/config";

export default defineConfig({
  base: "./",
  server: {
    proxy: {
      // dev mode: the engine runs separately, e.g. `urbanlens serve ... --port 8000`
      "^/(layers|tiles|traffic|stations|analysis|communities|buildings)": {
        target: "http://127.0.0.1:8000",
        changeOrigin: true,
      },
    },
  },
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
  },
});
