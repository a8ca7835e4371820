/**
 * Wire protocol schemas, the single source of truth for this service.
 *
 *   GET  /v1/health -> 200 {"status": "ok", "models": [string, ...]}
 *   POST /v1/embed  {"model": string, "images": [base64-PNG, ...],
 *                    "normalize"?: boolean}
 *                   -> 200 {"model": string, "dim": int,
 *                           "embeddings": [[number, ...], ...]}
 *
 * Errors: 400 malformed request or undecodable image, 404 unknown model,
 * 503 while a model is loading. Base64 uses the standard alphabet with
 * padding.
 */

import { z } from "zod";

export const EmbedRequestSchema = z
  .object({
    model: z.string().min(1),
    images: z.array(z.string()).min(1),
    normalize: z.boolean().optional(),
  })
  .strict();

export const EmbedResponseSchema = z
  .object({
    model: z.string().min(1),
    dim: z.number().int().positive(),
    embeddings: z.array(z.array(z.number())).min(1),
  })
  .strict();

export const HealthResponseSchema = z
  .object({
    status: z.literal("ok"),
    models: z.array(z.string()),
  })
  .strict();

export const ErrorResponseSchema = z.object({ error: z.string() }).strict();

export type EmbedRequest = z.infer<typeof EmbedRequestSchema>;
export type EmbedResponse = z.infer<typeof EmbedResponseSchema>;
export type HealthResponse = z.infer<typeof HealthResponseSchema>;

const BASE64_RE = /^[A-Za-z0-9+/]*={0,2}$/;

/** Strict standard-alphabet base64 with padding; rejects the lenient
 * forms Buffer.from would silently accept. */
export function decodeBase64Strict(data: string): Buffer {
  if (data.length === 0 || data.length % 4 !== 0 || !BASE64_RE.test(data)) {
    throw new Error("invalid base64");
  }
  const buf = Buffer.from(data, "base64");
  if (buf.toString("base64") !== data) {
    throw new Error("invalid base64");
  }
  return buf;
}
