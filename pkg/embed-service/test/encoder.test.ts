import { describe, expect, it } from "vitest";

import { FEATURE_LEN, ReferenceEncoder, extractFeatures, l2Normalize } from "../src/encoder.js";
import { decodePng, encodePng, resize } from "../src/image.js";
import { REFERENCE_MODELS } from "../src/registry.js";
import { barStimulus, gradientImage, solidImage, squareStimulus } from "./helpers.js";

function dist(a: Float32Array, b: Float32Array): number {
  let acc = 0;
  for (let i = 0; i < a.length; i++) {
    acc += (a[i]! - b[i]!) ** 2;
  }
  return Math.sqrt(acc);
}

describe("image codec", () => {
  it("png round trip is lossless", () => {
    const img = squareStimulus(48, 0.5, [200, 30, 60]);
    const back = decodePng(encodePng(img));
    expect(back.width).toBe(48);
    expect(Buffer.from(back.pixels).equals(Buffer.from(img.pixels))).toBe(true);
  });

  it("rejects non-png bytes", () => {
    expect(() => decodePng(Buffer.from("definitely not a png"))).toThrow("undecodable image");
  });

  it("resize keeps solid images solid", () => {
    const img = resize(solidImage(100, [10, 200, 30]), 64);
    expect(img.width).toBe(64);
    for (let i = 0; i < 64 * 64; i++) {
      expect(img.pixels[i * 3]).toBe(10);
      expect(img.pixels[i * 3 + 1]).toBe(200);
      expect(img.pixels[i * 3 + 2]).toBe(30);
    }
  });

  it("resize is deterministic", () => {
    const img = gradientImage(100);
    const a = resize(img, 224);
    const b = resize(img, 224);
    expect(Buffer.from(a.pixels).equals(Buffer.from(b.pixels))).toBe(true);
  });
});

describe("feature extraction", () => {
  it("has the documented length", () => {
    expect(extractFeatures(solidImage(32, [255, 255, 255])).length).toBe(FEATURE_LEN);
  });

  it("separates blank canvas from a mark", () => {
    const blank = extractFeatures(solidImage(64, [255, 255, 255]));
    const marked = extractFeatures(squareStimulus(64, 0.5));
    let diff = 0;
    for (let i = 0; i < blank.length; i++) {
      diff += Math.abs(blank[i]! - marked[i]!);
    }
    expect(diff).toBeGreaterThan(0.1);
  });
});

describe("reference encoder", () => {
  it("produces the registered dimensionality for every model", () => {
    const img = squareStimulus(64, 0.4);
    for (const m of REFERENCE_MODELS) {
      const enc = new ReferenceEncoder(m.modelId, m.inputResolution, m.dim);
      expect(enc.encode(img).length).toBe(m.dim);
    }
  });

  it("is deterministic to float32 precision", () => {
    const enc = new ReferenceEncoder("ViT-B/32", 224, 512);
    const img = barStimulus(64, 0.7);
    const a = enc.encode(img);
    const b = enc.encode(img);
    expect(Buffer.from(a.buffer).equals(Buffer.from(b.buffer))).toBe(true);
  });

  it("differs across models for the same image", () => {
    const img = squareStimulus(64, 0.4);
    const a = new ReferenceEncoder("ViT-B/32", 224, 512).encode(img);
    const b = new ReferenceEncoder("RN50x64", 448, 512).encode(img);
    expect(dist(a, b)).toBeGreaterThan(1e-4);
  });

  it("responds monotonically in scale to a growing mark", () => {
    const enc = new ReferenceEncoder("ViT-B/32", 224, 512);
    const base = enc.encode(barStimulus(64, 0.2));
    const near = enc.encode(barStimulus(64, 0.3));
    const far = enc.encode(barStimulus(64, 0.9));
    expect(dist(base, near)).toBeGreaterThan(0);
    expect(dist(base, far)).toBeGreaterThan(dist(base, near));
  });

  it("is sensitive to luminance changes", () => {
    const enc = new ReferenceEncoder("ViT-B/32", 224, 512);
    const dark = enc.encode(squareStimulus(64, 0.5, [80, 0, 0]));
    const bright = enc.encode(squareStimulus(64, 0.5, [255, 120, 120]));
    expect(dist(dark, bright)).toBeGreaterThan(1e-4);
  });
});

describe("l2 normalization", () => {
  it("produces unit vectors", () => {
    const enc = new ReferenceEncoder("ViT-B/32", 224, 512);
    const vec = l2Normalize(enc.encode(squareStimulus(64, 0.5)));
    let sq = 0;
    for (const v of vec) {
      sq += v * v;
    }
    expect(Math.sqrt(sq)).toBeCloseTo(1.0, 5);
  });

  it("leaves the zero vector alone", () => {
    const zero = new Float32Array(4);
    expect(Array.from(l2Normalize(zero))).toEqual([0, 0, 0, 0]);
  });
});
