/**
 * Deterministic reference encoders.
 *
 * Real CLIP weights cannot be bundled here, so each registered model is
 * backed by a hand-built visual feature extractor (block luminance and
 * ink coverage, color statistics, gradient orientation energy) expanded
 * to the model's embedding width through a projection seeded by the
 * model id. The output is a pure, reproducible function of the image
 * bytes at float32 precision, responds smoothly to the stimulus channels
 * the harness sweeps, and differs per model. Swap in a real encoder by
 * implementing `Encoder` and registering it.
 */

import { DecodedImage, resize } from "./image.js";

export interface Encoder {
  readonly dim: number;
  encode(image: DecodedImage): Float32Array;
}

const GRID = 8;

function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Block means, color statistics and gradient energy of the image. */
export function extractFeatures(img: DecodedImage): Float64Array {
  const n = img.width;
  const px = img.pixels;
  const lum = new Float64Array(n * n);
  const ink = new Float64Array(n * n);
  let sumR = 0;
  let sumG = 0;
  let sumB = 0;
  let sumChroma = 0;
  for (let i = 0; i < n * n; i++) {
    const r = px[i * 3]!;
    const g = px[i * 3 + 1]!;
    const b = px[i * 3 + 2]!;
    lum[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255;
    ink[i] = 1 - Math.min(r, g, b) / 255;
    sumR += r;
    sumG += g;
    sumB += b;
    sumChroma += (Math.max(r, g, b) - Math.min(r, g, b)) / 255;
  }

  const blocksLum = new Float64Array(GRID * GRID);
  const blocksInk = new Float64Array(GRID * GRID);
  const counts = new Float64Array(GRID * GRID);
  for (let y = 0; y < n; y++) {
    const by = Math.min(Math.floor((y * GRID) / n), GRID - 1);
    for (let x = 0; x < n; x++) {
      const bx = Math.min(Math.floor((x * GRID) / n), GRID - 1);
      const block = by * GRID + bx;
      blocksLum[block]! += 0.5 - lum[y * n + x]!;
      blocksInk[block]! += ink[y * n + x]!;
      counts[block]! += 1;
    }
  }
  for (let b = 0; b < GRID * GRID; b++) {
    blocksLum[b]! /= counts[b]!;
    blocksInk[b]! /= counts[b]!;
  }

  // gradient energy split over four orientation bins
  const orient = new Float64Array(4);
  let gradX = 0;
  let gradY = 0;
  for (let y = 1; y < n - 1; y++) {
    for (let x = 1; x < n - 1; x++) {
      const dx = lum[y * n + x + 1]! - lum[y * n + x - 1]!;
      const dy = lum[(y + 1) * n + x]! - lum[(y - 1) * n + x]!;
      const mag = Math.hypot(dx, dy);
      if (mag > 1e-12) {
        gradX += Math.abs(dx);
        gradY += Math.abs(dy);
        const angle = Math.atan2(dy, dx); // (-pi, pi]
        const bin = Math.min(Math.floor(((angle + Math.PI) / Math.PI) * 2) % 4, 3);
        orient[bin]! += mag;
      }
    }
  }
  const area = n * n;
  const inner = (n - 2) * (n - 2);

  const features = new Float64Array(GRID * GRID * 2 + 10);
  features.set(blocksLum, 0);
  features.set(blocksInk, GRID * GRID);
  let k = GRID * GRID * 2;
  features[k++] = sumR / area / 255;
  features[k++] = sumG / area / 255;
  features[k++] = sumB / area / 255;
  features[k++] = sumChroma / area;
  features[k++] = gradX / inner;
  features[k++] = gradY / inner;
  for (let b = 0; b < 4; b++) {
    features[k++] = orient[b]! / inner;
  }
  return features;
}

export const FEATURE_LEN = GRID * GRID * 2 + 10;

export class ReferenceEncoder implements Encoder {
  readonly dim: number;
  private readonly inputResolution: number;
  private readonly projection: Float64Array;

  constructor(modelId: string, inputResolution: number, dim: number) {
    this.dim = dim;
    this.inputResolution = inputResolution;
    const rand = mulberry32(fnv1a(modelId));
    const scale = 1 / Math.sqrt(FEATURE_LEN);
    this.projection = new Float64Array(dim * FEATURE_LEN);
    for (let i = 0; i < this.projection.length; i++) {
      this.projection[i] = (rand() * 2 - 1) * scale;
    }
  }

  encode(image: DecodedImage): Float32Array {
    const features = extractFeatures(resize(image, this.inputResolution));
    const out = new Float32Array(this.dim);
    for (let d = 0; d < this.dim; d++) {
      let acc = 0;
      const row = d * FEATURE_LEN;
      for (let k = 0; k < FEATURE_LEN; k++) {
        acc += this.projection[row + k]! * features[k]!;
      }
      out[d] = Math.fround(acc);
    }
    return out;
  }
}

export function l2Normalize(vec: Float32Array): Float32Array {
  let sq = 0;
  for (let i = 0; i < vec.length; i++) {
    sq += vec[i]! * vec[i]!;
  }
  const norm = Math.sqrt(sq);
  if (norm === 0) {
    return vec;
  }
  const out = new Float32Array(vec.length);
  for (let i = 0; i < vec.length; i++) {
    out[i] = Math.fround(vec[i]! / norm);
  }
  return out;
}
