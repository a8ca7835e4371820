/**
 * PNG decoding and resampling to a model's input resolution.
 */

import pngjs from "pngjs";

const { PNG } = pngjs;

export interface DecodedImage {
  width: number;
  height: number;
  /** RGB, row-major, 3 bytes per pixel. */
  pixels: Uint8Array;
}

export function decodePng(data: Buffer): DecodedImage {
  let png: InstanceType<typeof PNG>;
  try {
    png = PNG.sync.read(data);
  } catch (err) {
    throw new Error(`undecodable image: ${(err as Error).message}`);
  }
  const { width, height, data: rgba } = png;
  const pixels = new Uint8Array(width * height * 3);
  for (let i = 0, j = 0; i < rgba.length; i += 4, j += 3) {
    pixels[j] = rgba[i]!;
    pixels[j + 1] = rgba[i + 1]!;
    pixels[j + 2] = rgba[i + 2]!;
  }
  return { width, height, pixels };
}

export function encodePng(img: DecodedImage): Buffer {
  const png = new PNG({ width: img.width, height: img.height });
  for (let i = 0, j = 0; j < img.pixels.length; i += 4, j += 3) {
    png.data[i] = img.pixels[j]!;
    png.data[i + 1] = img.pixels[j + 1]!;
    png.data[i + 2] = img.pixels[j + 2]!;
    png.data[i + 3] = 255;
  }
  return PNG.sync.write(png);
}

/**
 * Bilinear resample to size x size. Deterministic: plain float64
 * arithmetic in a fixed order, no SIMD or threading.
 */
export function resize(img: DecodedImage, size: number): DecodedImage {
  if (img.width === size && img.height === size) {
    return img;
  }
  const out = new Uint8Array(size * size * 3);
  const sx = img.width / size;
  const sy = img.height / size;
  for (let y = 0; y < size; y++) {
    const fy = Math.min((y + 0.5) * sy - 0.5, img.height - 1);
    const y0 = Math.max(Math.floor(fy), 0);
    const y1 = Math.min(y0 + 1, img.height - 1);
    const wy = fy - y0;
    for (let x = 0; x < size; x++) {
      const fx = Math.min((x + 0.5) * sx - 0.5, img.width - 1);
      const x0 = Math.max(Math.floor(fx), 0);
      const x1 = Math.min(x0 + 1, img.width - 1);
      const wx = fx - x0;
      for (let c = 0; c < 3; c++) {
        const p00 = img.pixels[(y0 * img.width + x0) * 3 + c]!;
        const p01 = img.pixels[(y0 * img.width + x1) * 3 + c]!;
        const p10 = img.pixels[(y1 * img.width + x0) * 3 + c]!;
        const p11 = img.pixels[(y1 * img.width + x1) * 3 + c]!;
        const top = p00 * (1 - wx) + p01 * wx;
        const bottom = p10 * (1 - wx) + p11 * wx;
        out[(y * size + x) * 3 + c] = Math.round(top * (1 - wy) + bottom * wy);
      }
    }
  }
  return { width: size, height: size, pixels: out };
}
