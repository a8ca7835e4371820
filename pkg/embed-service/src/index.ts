import { serve } from "./app.js";
import { REFERENCE_MODELS, defaultRegistry } from "./registry.js";

const host = process.env.HOST ?? "127.0.0.1";
const port = Number(process.env.PORT ?? 8316);

const registry = defaultRegistry();
const server = serve(host, port, registry);
server.on("listening", () => {
  console.log(`embed-service listening on http://${host}:${port}`);
  console.log(`models: ${REFERENCE_MODELS.map((m) => m.modelId).join(", ")}`);
});

for (const signal of ["SIGINT", "SIGTERM"] as const) {
  process.on(signal, () => server.close(() => process.exit(0)));
}
