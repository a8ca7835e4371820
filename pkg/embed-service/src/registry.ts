/**
 * Model registry: the three reference image encoders plus whatever a
 * deployment registers on top.
 */

import { Encoder, ReferenceEncoder } from "./encoder.js";

export interface ModelRegistryEntry {
  modelId: string;
  /** Expected input resolution in pixels (square). */
  inputResolution: number;
  /** Embedding dimensionality. */
  dim: number;
}

/** The reference encoders and their published geometry. */
export const REFERENCE_MODELS: readonly ModelRegistryEntry[] = [
  { modelId: "RN50x64", inputResolution: 448, dim: 1024 },
  { modelId: "ViT-B/32", inputResolution: 224, dim: 512 },
  { modelId: "ViT-L/14@336px", inputResolution: 336, dim: 768 },
];

export type ModelState = "loading" | "ready";

interface Slot {
  entry: ModelRegistryEntry;
  encoder: Encoder;
  state: ModelState;
}

export class ModelRegistry {
  private readonly slots = new Map<string, Slot>();

  register(entry: ModelRegistryEntry, encoder: Encoder, state: ModelState = "ready"): void {
    if (encoder.dim !== entry.dim) {
      throw new Error(
        `encoder dim ${encoder.dim} does not match registry entry ${entry.modelId} (${entry.dim})`,
      );
    }
    this.slots.set(entry.modelId, { entry, encoder, state });
  }

  modelIds(): string[] {
    return [...this.slots.keys()];
  }

  get(modelId: string): Slot | undefined {
    return this.slots.get(modelId);
  }

  setState(modelId: string, state: ModelState): void {
    const slot = this.slots.get(modelId);
    if (!slot) {
      throw new Error(`unknown model ${modelId}`);
    }
    slot.state = state;
  }
}

export function defaultRegistry(models: readonly ModelRegistryEntry[] = REFERENCE_MODELS): ModelRegistry {
  const registry = new ModelRegistry();
  for (const entry of models) {
    registry.register(entry, new ReferenceEncoder(entry.modelId, entry.inputResolution, entry.dim));
  }
  return registry;
}
