// Wire types for the lesson service. Lesson payloads are answer-free by
// design: the server only ever reveals an expected answer after grading.

export type SectionSummary = { subject: string; lessons: number };

export type CourseSummary = {
  id: string;
  language: string;
  sections: SectionSummary[];
};

export type CmOption = { concept_id: string; gloss: string };

export type TsExercise = {
  id: string;
  kind: "TS1" | "TS2";
  prompt: string;
  bank: string[];
};

export type CmExercise = {
  id: string;
  kind: "CM";
  prompt: string;
  options: CmOption[];
};

export type Exercise = TsExercise | CmExercise;

export type LessonPayload = {
  course_id: string;
  section_index: number;
  subject: string;
  lesson_index: number;
  exercise_count: number;
  exercises: Exercise[];
};

export type Progress = {
  student_id: string;
  course_id: string;
  cursor: { section: number; lesson: number };
  lesson_run: { exercise_index: number } | null;
  gems: { current: number; max: number };
  streak: { days: number; last_active_date: string | null };
  quest: { done: number; target: number; date: string | null };
  completed: boolean;
  lockout_remaining_s: number;
};

export type GradeResponse = {
  correct: boolean;
  expected: string[] | string | null;
  gem_delta: number;
  locked_out: boolean;
  lockout_remaining_s: number;
  lesson_completed: boolean;
  state: Progress;
};

export type AssetManifest = Record<string, string>;

export function isCm(exercise: Exercise): exercise is CmExercise {
  return exercise.kind === "CM";
}
