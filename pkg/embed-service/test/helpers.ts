import { DecodedImage, encodePng } from "../src/image.js";

export function solidImage(size: number, rgb: [number, number, number]): DecodedImage {
  const pixels = new Uint8Array(size * size * 3);
  for (let i = 0; i < size * size; i++) {
    pixels[i * 3] = rgb[0];
    pixels[i * 3 + 1] = rgb[1];
    pixels[i * 3 + 2] = rgb[2];
  }
  return { width: size, height: size, pixels };
}

/** White canvas with a centered filled square, side = size * frac. */
export function squareStimulus(
  size: number,
  frac: number,
  rgb: [number, number, number] = [255, 0, 0],
): DecodedImage {
  const img = solidImage(size, [255, 255, 255]);
  const side = Math.round(size * frac);
  const start = Math.floor((size - side) / 2);
  for (let y = start; y < start + side; y++) {
    for (let x = start; x < start + side; x++) {
      const i = (y * size + x) * 3;
      img.pixels[i] = rgb[0];
      img.pixels[i + 1] = rgb[1];
      img.pixels[i + 2] = rgb[2];
    }
  }
  return img;
}

/** White canvas with a horizontal bar through the middle. */
export function barStimulus(size: number, lengthFrac: number, thickness = 4): DecodedImage {
  const img = solidImage(size, [255, 255, 255]);
  const len = Math.round(size * lengthFrac);
  const x0 = Math.floor((size - len) / 2);
  const y0 = Math.floor(size / 2 - thickness / 2);
  for (let y = y0; y < y0 + thickness; y++) {
    for (let x = x0; x < x0 + len; x++) {
      const i = (y * size + x) * 3;
      img.pixels[i] = 255;
      img.pixels[i + 1] = 0;
      img.pixels[i + 2] = 0;
    }
  }
  return img;
}

export function gradientImage(size: number): DecodedImage {
  const img = solidImage(size, [0, 0, 0]);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const v = Math.round((x / (size - 1)) * 255);
      const i = (y * size + x) * 3;
      img.pixels[i] = v;
      img.pixels[i + 1] = v;
      img.pixels[i + 2] = v;
    }
  }
  return img;
}

export function pngBase64(img: DecodedImage): string {
  return encodePng(img).toString("base64");
}
