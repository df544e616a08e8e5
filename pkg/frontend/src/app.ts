import { ApiClient, ApiError } from "./api.js";
import { newNonce } from "./state.js";
import {
  CmPlayer,
  LockoutView,
  TsPlayer,
  renderCourseMap,
  renderError,
  renderHud,
  renderLockout,
} from "./render.js";
import { isCm } from "./types.js";
import type { AssetManifest, CourseSummary, LessonPayload, Progress } from "./types.js";

export type AppOptions = {
  root: HTMLElement;
  api: ApiClient;
  student: string;
  manifest: AssetManifest;
};

type Banner = { text: string; good: boolean } | null;

/** Lesson player controller.
 *
 * Every screen is rebuilt from the latest server responses plus the
 * local selection, so a refresh mid-lesson reconstructs the same view.
 * User actions funnel through a single promise chain: one in-flight
 * grading request at a time.
 */
export class App {
  private course: CourseSummary | null = null;
  private progress: Progress | null = null;
  private lesson: LessonPayload | null = null;
  private exerciseIndex = 0;
  private lockout: LockoutView | null = null;
  private banner: Banner = null;
  private chain: Promise<void> = Promise.resolve();

  constructor(private options: AppOptions) {}

  /** Wait for all queued actions to finish (used by tests). */
  settle(): Promise<void> {
    return this.chain;
  }

  private enqueue(task: () => Promise<void>): Promise<void> {
    this.chain = this.chain.then(task).catch((err) => this.showError(err));
    return this.chain;
  }

  start(): Promise<void> {
    return this.enqueue(async () => {
      const courses = await this.options.api.courses();
      if (courses.length === 0) {
        this.paint([renderError("No courses are installed on this server.", () => this.start())]);
        return;
      }
      this.course = courses[0];
      await this.refresh();
    });
  }

  /** Re-fetch progress and show whichever screen the server dictates:
   * the lockout countdown, a lesson already in progress (so a browser
   * refresh mid-lesson reconstructs the exercise screen), or the map. */
  private async refresh(): Promise<void> {
    this.progress = await this.options.api.progress(this.options.student, this.course!.id);
    if (this.progress.lockout_remaining_s > 0) {
      this.showLockout(this.progress.lockout_remaining_s);
      return;
    }
    const run = this.progress.lesson_run;
    if (run !== null && this.lesson === null && !this.progress.completed) {
      const { section, lesson } = this.progress.cursor;
      await this.openLesson(section, lesson, run.exercise_index);
      return;
    }
    this.lesson = null;
    this.showMap();
  }

  private paint(content: HTMLElement[]): void {
    if (this.lockout) {
      this.lockout.stop();
      this.lockout = null;
    }
    this.options.root.replaceChildren(...content);
  }

  private bannerEl(): HTMLElement[] {
    if (!this.banner) return [];
    const node = document.createElement("div");
    node.className = `result-banner ${this.banner.good ? "good" : "bad"}`;
    node.textContent = this.banner.text;
    return [node];
  }

  private showMap(): void {
    const map = renderCourseMap(this.course!, this.progress!, (section, lesson) => {
      void this.enqueue(() => this.openLesson(section, lesson));
    });
    this.paint([renderHud(this.progress!), ...this.bannerEl(), map]);
    this.banner = null;
  }

  async openLesson(section: number, lesson: number, startIndex = 0): Promise<void> {
    try {
      this.lesson = await this.options.api.lesson(
        this.course!.id,
        section,
        lesson,
        this.options.student,
      );
    } catch (err) {
      if (err instanceof ApiError && err.code === "LOCKED_OUT") {
        this.showLockout(err.retryAfterS ?? 0);
        return;
      }
      throw err;
    }
    this.exerciseIndex = Math.min(startIndex, this.lesson.exercises.length - 1);
    this.banner = null;
    this.showExercise();
  }

  private showExercise(): void {
    const lesson = this.lesson!;
    const exercise = lesson.exercises[this.exerciseIndex];
    const onSubmit = (payload: string[] | string) => {
      void this.enqueue(() => this.submit(payload));
    };
    const player = isCm(exercise)
      ? new CmPlayer(exercise, this.options.manifest, onSubmit)
      : new TsPlayer(exercise, onSubmit);
    player.root.setAttribute("data-exercise-id", exercise.id);
    const position = document.createElement("p");
    position.className = "lesson-position";
    position.textContent = `${lesson.subject} · lesson ${lesson.lesson_index + 1} · exercise ${
      this.exerciseIndex + 1
    }/${lesson.exercise_count}`;
    this.paint([renderHud(this.progress!), ...this.bannerEl(), position, player.root]);
    this.banner = null;
  }

  private async submit(payload: string[] | string): Promise<void> {
    const lesson = this.lesson!;
    const exercise = lesson.exercises[this.exerciseIndex];
    let response;
    try {
      response = await this.options.api.submit(
        this.course!.id,
        this.options.student,
        exercise.id,
        payload,
        newNonce(),
      );
    } catch (err) {
      if (err instanceof ApiError && err.code === "LOCKED_OUT") {
        this.showLockout(err.retryAfterS ?? 0);
        return;
      }
      throw err;
    }
    this.progress = response.state;
    if (response.correct) {
      this.banner = { text: "Correct!", good: true };
      if (response.lesson_completed) {
        await this.refresh();
      } else {
        this.exerciseIndex += 1;
        this.showExercise();
      }
      return;
    }
    if (response.locked_out) {
      this.showLockout(response.lockout_remaining_s);
      return;
    }
    const reveal = Array.isArray(response.expected)
      ? response.expected.join(" ")
      : response.expected;
    this.banner = { text: `Not quite - it was "${reveal}". One red gem lost.`, good: false };
    this.showExercise(); // same exercise again, strip cleared, bank restored
  }

  /** Countdown screen; expiry triggers a server re-check rather than a
   * client-side unlock (the server clock is authoritative). */
  private showLockout(remainingSeconds: number): void {
    const view = renderLockout(remainingSeconds, () => {
      void this.enqueue(() => this.refresh());
    });
    this.paint([view.root]);
    this.lockout = view;
  }

  private showError(err: unknown): void {
    const message = err instanceof Error ? err.message : String(err);
    this.paint([
      renderError(`Something went wrong: ${message}`, () => {
        void this.start();
      }),
    ]);
  }
}
