/**
 * The HTTP service: GET /v1/health and POST /v1/embed.
 */

import http from "node:http";

import express from "express";

import { l2Normalize } from "./encoder.js";
import { decodePng } from "./image.js";
import { EmbedRequestSchema, decodeBase64Strict } from "./protocol.js";
import { ModelRegistry, defaultRegistry } from "./registry.js";

export function createApp(registry: ModelRegistry = defaultRegistry()): express.Express {
  const app = express();
  app.use(express.json({ limit: "128mb" }));

  app.get("/v1/health", (_req, res) => {
    res.status(200).json({ status: "ok", models: registry.modelIds() });
  });

  app.post("/v1/embed", (req, res) => {
    const parsed = EmbedRequestSchema.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: `malformed request: ${parsed.error.issues[0]?.message}` });
      return;
    }
    const { model, images, normalize } = parsed.data;

    const slot = registry.get(model);
    if (!slot) {
      res.status(404).json({ error: `unknown model ${model}` });
      return;
    }
    if (slot.state === "loading") {
      res.status(503).json({ error: `model ${model} loading` });
      return;
    }

    const embeddings: number[][] = [];
    for (let i = 0; i < images.length; i++) {
      let decoded;
      try {
        decoded = decodePng(decodeBase64Strict(images[i]!));
      } catch (err) {
        res.status(400).json({ error: `image ${i}: ${(err as Error).message}` });
        return;
      }
      let vec = slot.encoder.encode(decoded);
      if (normalize) {
        vec = l2Normalize(vec);
      }
      embeddings.push(Array.from(vec));
    }
    res.status(200).json({ model, dim: slot.encoder.dim, embeddings });
  });

  // express surfaces body-parser failures here; report them as 400s
  app.use(
    (err: Error, _req: express.Request, res: express.Response, next: express.NextFunction) => {
      if (res.headersSent) {
        next(err);
        return;
      }
      res.status(400).json({ error: `malformed request: ${err.message}` });
    },
  );
  return app;
}

export function serve(host: string, port: number, registry?: ModelRegistry): http.Server {
  const app = createApp(registry);
  return app.listen(port, host);
}
