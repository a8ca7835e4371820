import http from "node:http";
import { AddressInfo } from "node:net";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { createApp } from "../src/app.js";
import {
  EmbedResponseSchema,
  ErrorResponseSchema,
  HealthResponseSchema,
} from "../src/protocol.js";
import { REFERENCE_MODELS, defaultRegistry } from "../src/registry.js";
import { barStimulus, gradientImage, pngBase64, solidImage, squareStimulus } from "./helpers.js";

const registry = defaultRegistry();
let server: http.Server;
let baseUrl: string;

beforeAll(async () => {
  const app = createApp(registry);
  server = app.listen(0, "127.0.0.1");
  await new Promise<void>((resolve) => server.once("listening", resolve));
  const { port } = server.address() as AddressInfo;
  baseUrl = `http://127.0.0.1:${port}`;
});

afterAll(async () => {
  await new Promise<void>((resolve, reject) =>
    server.close((err) => (err ? reject(err) : resolve())),
  );
});

async function postEmbed(body: unknown): Promise<{ status: number; json: any }> {
  const res = await fetch(`${baseUrl}/v1/embed`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: typeof body === "string" ? body : JSON.stringify(body),
  });
  return { status: res.status, json: await res.json() };
}

const CORPUS = [
  solidImage(96, [255, 255, 255]),
  squareStimulus(96, 0.5),
  barStimulus(96, 0.8),
  gradientImage(96),
];

describe("GET /v1/health", () => {
  it("lists the three reference models", async () => {
    const res = await fetch(`${baseUrl}/v1/health`);
    expect(res.status).toBe(200);
    const payload = HealthResponseSchema.parse(await res.json());
    expect(payload.models).toEqual(["RN50x64", "ViT-B/32", "ViT-L/14@336px"]);
  });
});

describe("POST /v1/embed", () => {
  it("conforms to the response schema for the whole corpus, all models", async () => {
    for (const model of REFERENCE_MODELS) {
      const { status, json } = await postEmbed({
        model: model.modelId,
        images: CORPUS.map(pngBase64),
      });
      expect(status).toBe(200);
      const payload = EmbedResponseSchema.parse(json);
      expect(payload.model).toBe(model.modelId);
      expect(payload.dim).toBe(model.dim);
      expect(payload.embeddings).toHaveLength(CORPUS.length);
      for (const row of payload.embeddings) {
        expect(row).toHaveLength(model.dim);
        for (const v of row) {
          expect(Number.isFinite(v)).toBe(true);
        }
      }
    }
  });

  it("is deterministic across repeated requests", async () => {
    const body = { model: "ViT-B/32", images: [pngBase64(squareStimulus(96, 0.3))] };
    const first = await postEmbed(body);
    const second = await postEmbed(body);
    expect(first.status).toBe(200);
    expect(second.json.embeddings).toEqual(first.json.embeddings);
  });

  it("honors the per-request normalize option", async () => {
    const images = [pngBase64(barStimulus(96, 0.6))];
    const raw = await postEmbed({ model: "ViT-B/32", images });
    const normed = await postEmbed({ model: "ViT-B/32", images, normalize: true });
    const norm = (row: number[]) => Math.sqrt(row.reduce((s, v) => s + v * v, 0));
    expect(norm(raw.json.embeddings[0])).not.toBeCloseTo(1.0, 3);
    expect(norm(normed.json.embeddings[0])).toBeCloseTo(1.0, 5);
  });

  it("keeps response order aligned with request order", async () => {
    const imgs = [squareStimulus(96, 0.2), squareStimulus(96, 0.8)];
    const batch = await postEmbed({ model: "ViT-B/32", images: imgs.map(pngBase64) });
    const single0 = await postEmbed({ model: "ViT-B/32", images: [pngBase64(imgs[0]!)] });
    const single1 = await postEmbed({ model: "ViT-B/32", images: [pngBase64(imgs[1]!)] });
    expect(batch.json.embeddings[0]).toEqual(single0.json.embeddings[0]);
    expect(batch.json.embeddings[1]).toEqual(single1.json.embeddings[0]);
  });

  it("404s on an unknown model", async () => {
    const { status, json } = await postEmbed({
      model: "ViT-H/14",
      images: [pngBase64(CORPUS[1]!)],
    });
    expect(status).toBe(404);
    expect(ErrorResponseSchema.parse(json).error).toContain("unknown model");
  });

  it("503s while a model is loading", async () => {
    registry.setState("RN50x64", "loading");
    try {
      const { status, json } = await postEmbed({
        model: "RN50x64",
        images: [pngBase64(CORPUS[1]!)],
      });
      expect(status).toBe(503);
      expect(ErrorResponseSchema.parse(json).error).toContain("loading");
    } finally {
      registry.setState("RN50x64", "ready");
    }
  });

  it("400s on malformed JSON", async () => {
    const { status, json } = await postEmbed("{not json");
    expect(status).toBe(400);
    ErrorResponseSchema.parse(json);
  });

  it("400s on schema violations", async () => {
    for (const bad of [
      { images: [pngBase64(CORPUS[0]!)] },
      { model: "ViT-B/32", images: [] },
      { model: "ViT-B/32", images: [pngBase64(CORPUS[0]!)], extra: 1 },
    ]) {
      const { status } = await postEmbed(bad);
      expect(status).toBe(400);
    }
  });

  it("400s on invalid base64, naming the image", async () => {
    const { status, json } = await postEmbed({
      model: "ViT-B/32",
      images: [pngBase64(CORPUS[1]!), "this is not base64!!"],
    });
    expect(status).toBe(400);
    expect(json.error).toContain("image 1");
    expect(json.error).toContain("base64");
  });

  it("400s on valid base64 that is not a PNG", async () => {
    const notPng = Buffer.from("plain text payload").toString("base64");
    const { status, json } = await postEmbed({ model: "ViT-B/32", images: [notPng] });
    expect(status).toBe(400);
    expect(json.error).toContain("undecodable image");
  });

  it("404s on unknown paths", async () => {
    const res = await fetch(`${baseUrl}/v2/embed`, { method: "POST" });
    expect(res.status).toBe(404);
  });
});
