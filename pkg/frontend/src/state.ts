// Pure view-state helpers, kept out of the DOM layer for unit testing.

import type { CourseSummary, Progress } from "./types.js";

// A picked token remembers its bank slot so duplicated surface forms in
// the bank stay independently selectable.
export type Pick = { token: string; bankIndex: number };

export function pickToken(selection: Pick[], token: string, bankIndex: number): Pick[] {
  if (selection.some((p) => p.bankIndex === bankIndex)) {
    return selection;
  }
  return [...selection, { token, bankIndex }];
}

export function dropToken(selection: Pick[], position: number): Pick[] {
  return selection.filter((_, i) => i !== position);
}

export function selectionTokens(selection: Pick[]): string[] {
  return selection.map((p) => p.token);
}

export type NodeState = "done" | "current" | "locked";

/** Linear progression map: everything before the cursor is done, the
 * cursor itself is the single current node, everything after is locked. */
export function mapNodes(course: CourseSummary, progress: Progress): NodeState[][] {
  const { section, lesson } = progress.cursor;
  return course.sections.map((summary, s) =>
    Array.from({ length: summary.lessons }, (_, l): NodeState => {
      if (progress.completed) return "done";
      if (s < section || (s === section && l < lesson)) return "done";
      if (s === section && l === lesson) return "current";
      return "locked";
    }),
  );
}

export function formatCountdown(totalSeconds: number): string {
  const clamped = Math.max(0, Math.floor(totalSeconds));
  const minutes = Math.floor(clamped / 60);
  const seconds = clamped % 60;
  return `${minutes}:${String(seconds).padStart(2, "0")}`;
}

export function newNonce(): string {
  if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `n-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}
