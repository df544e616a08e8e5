import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { loadManifest } from "./assets.js";
import { newNonce } from "./state.js";

const STUDENT_KEY = "bilingo_student";

function studentId(): string {
  let id = localStorage.getItem(STUDENT_KEY);
  if (!id) {
    id = newNonce();
    localStorage.setItem(STUDENT_KEY, id);
  }
  return id;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const manifest = await loadManifest();
  const app = new App({
    root,
    api: new ApiClient(""),
    student: studentId(),
    manifest,
  });
  await app.start();
}

void boot();
