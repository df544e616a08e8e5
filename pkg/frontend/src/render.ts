// DOM components. Everything renders from server data plus the local
// selection; no component ever sees answer material before grading.

import { dropToken, formatCountdown, mapNodes, pickToken, selectionTokens } from "./state.js";
import type { Pick } from "./state.js";
import type {
  AssetManifest,
  CmExercise,
  CourseSummary,
  Progress,
  TsExercise,
} from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderHud(progress: Progress): HTMLElement {
  const hud = el("header", "hud");
  const gems = el("div", "hud-gems");
  gems.setAttribute("data-gems", String(progress.gems.current));
  gems.append(
    el("span", "gem-icons", "♦".repeat(progress.gems.current) + "♢".repeat(progress.gems.max - progress.gems.current)),
    el("span", "gem-count", `${progress.gems.current}/${progress.gems.max}`),
  );
  const streak = el("div", "hud-streak", `🔥 ${progress.streak.days} day streak`);
  const quest = el(
    "div",
    "hud-quest",
    `Daily quest: ${Math.min(progress.quest.done, progress.quest.target)}/${progress.quest.target} lessons`,
  );
  hud.append(gems, streak, quest);
  return hud;
}

export function renderCourseMap(
  course: CourseSummary,
  progress: Progress,
  onOpenLesson: (section: number, lesson: number) => void,
): HTMLElement {
  const map = el("main", "course-map");
  map.append(el("h1", "course-title", `${course.language} course`));
  const states = mapNodes(course, progress);
  course.sections.forEach((section, s) => {
    const block = el("section", "course-section");
    block.append(el("h2", "section-subject", section.subject));
    const path = el("div", "lesson-path");
    states[s].forEach((state, l) => {
      const node = el("button", `lesson-node ${state}`, `${l + 1}`);
      node.setAttribute("data-section", String(s));
      node.setAttribute("data-lesson", String(l));
      node.setAttribute("data-state", state);
      node.disabled = state === "locked";
      if (state !== "locked") {
        node.addEventListener("click", () => onOpenLesson(s, l));
      }
      path.append(node);
    });
    block.append(path);
    map.append(block);
  });
  if (progress.completed) {
    map.append(el("p", "course-complete", "Course complete!"));
  }
  return map;
}

export type SubmitHandler = (payload: string[] | string) => void;

/** Tap-to-order player for both translate-sentence directions: tapping a
 * bank token appends it to the answer strip, tapping a strip token puts
 * it back. Submit stays disabled while the strip is empty. */
export class TsPlayer {
  readonly root: HTMLElement;
  private selection: Pick[] = [];
  private strip: HTMLElement;
  private bankBox: HTMLElement;
  private submitButton: HTMLButtonElement;
  private feedback: HTMLElement;

  constructor(private exercise: TsExercise, private onSubmit: SubmitHandler) {
    this.root = el("div", "player ts-player");
    this.root.append(
      el("p", "exercise-label", exercise.kind === "TS1" ? "Build the translation" : "Translate to Portuguese"),
      el("p", "prompt", exercise.prompt),
    );
    this.strip = el("div", "answer-strip");
    this.bankBox = el("div", "token-bank");
    this.feedback = el("p", "feedback");
    this.submitButton = el("button", "submit");
    this.submitButton.textContent = "Check";
    this.submitButton.addEventListener("click", () => {
      if (this.selection.length > 0) {
        this.onSubmit(selectionTokens(this.selection));
      }
    });
    this.root.append(this.strip, this.bankBox, this.submitButton, this.feedback);
    this.redraw();
  }

  private redraw(): void {
    this.strip.replaceChildren();
    this.selection.forEach((picked, position) => {
      const chip = el("button", "strip-token", picked.token);
      chip.addEventListener("click", () => {
        this.selection = dropToken(this.selection, position);
        this.redraw();
      });
      this.strip.append(chip);
    });
    this.bankBox.replaceChildren();
    this.exercise.bank.forEach((token, bankIndex) => {
      const used = this.selection.some((p) => p.bankIndex === bankIndex);
      const chip = el("button", "bank-token", token);
      chip.disabled = used;
      chip.setAttribute("data-bank-index", String(bankIndex));
      chip.addEventListener("click", () => {
        this.selection = pickToken(this.selection, token, bankIndex);
        this.redraw();
      });
      this.bankBox.append(chip);
    });
    this.submitButton.disabled = this.selection.length === 0;
  }

  clearStrip(): void {
    this.selection = [];
    this.redraw();
  }

  setPending(pending: boolean): void {
    this.submitButton.disabled = pending || this.selection.length === 0;
  }

  showFeedback(text: string, correct: boolean): void {
    this.feedback.textContent = text;
    this.feedback.className = `feedback ${correct ? "good" : "bad"}`;
  }
}

/** Option-grid player for concept matching: image card when the asset
 * manifest has an entry, gloss card otherwise. */
export class CmPlayer {
  readonly root: HTMLElement;
  private chosen: string | null = null;
  private submitButton: HTMLButtonElement;
  private feedback: HTMLElement;

  constructor(
    exercise: CmExercise,
    manifest: AssetManifest,
    private onSubmit: SubmitHandler,
  ) {
    this.root = el("div", "player cm-player");
    this.root.append(
      el("p", "exercise-label", "Which one is…"),
      el("p", "prompt", exercise.prompt),
    );
    const grid = el("div", "option-grid");
    for (const option of exercise.options) {
      const card = el("button", "option-card");
      card.setAttribute("data-concept", option.concept_id);
      const imageUrl = manifest[option.concept_id];
      if (imageUrl) {
        const image = el("img", "option-image");
        image.src = imageUrl;
        image.alt = option.gloss;
        card.append(image, el("span", "option-caption", option.gloss));
      } else {
        card.append(el("span", "gloss-card", option.gloss));
      }
      card.addEventListener("click", () => {
        this.chosen = option.concept_id;
        grid.querySelectorAll(".option-card").forEach((n) => n.classList.remove("chosen"));
        card.classList.add("chosen");
        this.submitButton.disabled = false;
      });
      grid.append(card);
    }
    this.feedback = el("p", "feedback");
    this.submitButton = el("button", "submit");
    this.submitButton.textContent = "Check";
    this.submitButton.disabled = true;
    this.submitButton.addEventListener("click", () => {
      if (this.chosen !== null) {
        this.onSubmit(this.chosen);
      }
    });
    this.root.append(grid, this.submitButton, this.feedback);
  }

  setPending(pending: boolean): void {
    this.submitButton.disabled = pending || this.chosen === null;
  }

  showFeedback(text: string, correct: boolean): void {
    this.feedback.textContent = text;
    this.feedback.className = `feedback ${correct ? "good" : "bad"}`;
  }
}

export type LockoutView = { root: HTMLElement; stop: () => void };

/** Full-screen countdown that blocks lesson entry. When it reaches zero
 * the caller re-checks with the server; the client never unlocks on its
 * own clock alone. */
export function renderLockout(remainingSeconds: number, onExpired: () => void): LockoutView {
  const root = el("main", "lockout");
  root.append(el("h1", undefined, "Out of red gems"));
  const timer = el("div", "countdown", formatCountdown(remainingSeconds));
  root.append(timer, el("p", undefined, "Wait for the timer, then try the lesson again."));
  let left = remainingSeconds;
  const handle = window.setInterval(() => {
    left -= 1;
    timer.textContent = formatCountdown(left);
    if (left <= 0) {
      window.clearInterval(handle);
      onExpired();
    }
  }, 1000);
  return { root, stop: () => window.clearInterval(handle) };
}

export function renderError(message: string, onRetry: () => void): HTMLElement {
  const banner = el("main", "error-banner");
  banner.append(el("p", undefined, message));
  const retry = el("button", "retry", "Retry");
  retry.addEventListener("click", onRetry);
  banner.append(retry);
  return banner;
}
