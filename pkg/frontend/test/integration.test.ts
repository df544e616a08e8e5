// End-to-end play-through against a real `bilingo serve` process using the
// golden course pack: complete one full lesson, watch the cursor advance,
// burn all three gems in the next lesson, land on the 5:00 countdown.
import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";

const REPO_ROOT = resolve(__dirname, "..", "..");
const GOLDEN_PACK = join(REPO_ROOT, "tests", "fixtures", "golden_pack.json");
const UI_DIST = join(REPO_ROOT, "frontend", "dist");
const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

type PackExercise = {
  id: string;
  kind: string;
  answer: string[] | string;
};

function packAnswers(): Map<string, PackExercise> {
  const pack = JSON.parse(readFileSync(GOLDEN_PACK, "utf-8"));
  const byId = new Map<string, PackExercise>();
  for (const section of pack.sections) {
    for (const lesson of section.lessons) {
      for (const exercise of lesson.exercises) {
        byId.set(exercise.id, exercise);
      }
    }
  }
  return byId;
}

let server: ChildProcess;

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-m",
      "bilingo.cli",
      "serve",
      "--pack",
      GOLDEN_PACK,
      "--state",
      mkdtempSync(join(tmpdir(), "bilingo-state-")),
      "--port",
      String(PORT),
      "--ui",
      UI_DIST,
    ],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  for (let i = 0; i < 100; i++) {
    try {
      const response = await fetch(`${BASE}/api/courses`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("server did not come up");
});

afterAll(() => {
  server?.kill();
});

function mount(): HTMLElement {
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  return root;
}

function currentExercise(root: HTMLElement, answers: Map<string, PackExercise>): PackExercise {
  const id = root.querySelector("[data-exercise-id]")?.getAttribute("data-exercise-id");
  const exercise = id ? answers.get(id) : undefined;
  if (!exercise) throw new Error(`unknown exercise on screen: ${id}`);
  return exercise;
}

function submitCorrect(root: HTMLElement, exercise: PackExercise): void {
  if (exercise.kind === "CM") {
    root
      .querySelector<HTMLButtonElement>(`[data-concept="${exercise.answer as string}"]`)!
      .click();
  } else {
    for (const token of exercise.answer as string[]) {
      const button = [...root.querySelectorAll<HTMLButtonElement>(".bank-token")].find(
        (b) => b.textContent === token && !b.disabled,
      );
      if (!button) throw new Error(`bank is missing token ${token}`);
      button.click();
    }
  }
  root.querySelector<HTMLButtonElement>(".submit")!.click();
}

function submitWrong(root: HTMLElement, exercise: PackExercise): void {
  if (exercise.kind === "CM") {
    const wrong = [...root.querySelectorAll<HTMLButtonElement>(".option-card")].find(
      (card) => card.getAttribute("data-concept") !== exercise.answer,
    )!;
    wrong.click();
  } else {
    // Answers in the golden pack are all >= 2 tokens: one token is wrong.
    root.querySelector<HTMLButtonElement>(".bank-token:not(:disabled)")!.click();
  }
  root.querySelector<HTMLButtonElement>(".submit")!.click();
}

describe("live play-through", () => {
  const answers = packAnswers();
  const student = `it-${Date.now()}`;
  const api = new ApiClient(BASE);

  it("serves the built web player bundle", async () => {
    const index = await fetch(`${BASE}/`).then((r) => r.text());
    expect(index).toContain('<div id="app"');
    const manifest = await fetch(`${BASE}/asset_manifest.json`).then((r) => r.json());
    expect(manifest).toEqual({});
  });

  it(
    "completes a lesson, advances the cursor, then hits the 5:00 lockout",
    { timeout: 60000 },
    async () => {
      const root = mount();
      const app = new App({ root, api, student, manifest: {} });
      await app.start();

      // Fresh student: first node current, everything else locked.
      const firstNode = root.querySelector(".lesson-node.current")!;
      expect(firstNode.getAttribute("data-section")).toBe("0");
      expect(firstNode.getAttribute("data-lesson")).toBe("0");

      (firstNode as HTMLButtonElement).click();
      await app.settle();

      let sawGlossCard = false;
      for (let step = 0; step < 4; step++) {
        const exercise = currentExercise(root, answers);
        if (exercise.kind === "CM") {
          // Empty manifest: options must render as gloss cards, and
          // grading still works below.
          expect(root.querySelectorAll(".gloss-card").length).toBeGreaterThan(0);
          sawGlossCard = true;
        }
        submitCorrect(root, exercise);
        await app.settle();
      }
      expect(sawGlossCard).toBe(true);

      // Lesson done: back on the map with the cursor advanced (0,0)->(0,1).
      const progress = await api.progress(student, "guajajara-demo");
      expect(progress.cursor).toEqual({ section: 0, lesson: 1 });
      const nextNode = root.querySelector(".lesson-node.current")!;
      expect(nextNode.getAttribute("data-section")).toBe("0");
      expect(nextNode.getAttribute("data-lesson")).toBe("1");

      // Three mistakes in the next lesson: gems 3 -> 0, lockout screen.
      (nextNode as HTMLButtonElement).click();
      await app.settle();
      for (let mistake = 0; mistake < 3; mistake++) {
        submitWrong(root, currentExercise(root, answers));
        await app.settle();
      }
      expect(root.querySelector(".countdown")?.textContent).toBe("5:00");

      // The server agrees the student is locked out.
      const locked = await api.progress(student, "guajajara-demo");
      expect(locked.gems.current).toBe(0);
      expect(locked.lockout_remaining_s).toBeGreaterThan(295);
      expect(locked.lockout_remaining_s).toBeLessThanOrEqual(300);
    },
  );
});
