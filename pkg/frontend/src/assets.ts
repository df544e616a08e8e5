import type { AssetManifest } from "./types.js";

/** Load the concept-to-image manifest deployed next to the bundle.
 * Missing or unreadable manifests mean every option falls back to a
 * gloss card, which is the default experience. */
export async function loadManifest(url = "./asset_manifest.json"): Promise<AssetManifest> {
  try {
    const response = await fetch(url);
    if (!response.ok) return {};
    const data = await response.json();
    return typeof data === "object" && data !== null ? (data as AssetManifest) : {};
  } catch {
    return {};
  }
}
