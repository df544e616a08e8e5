import type { CourseSummary, GradeResponse, LessonPayload, Progress } from "./types.js";

export class ApiError extends Error {
  code: string;
  status: number;
  retryAfterS: number | null;

  constructor(code: string, message: string, status: number, retryAfterS: number | null = null) {
    super(message);
    this.code = code;
    this.status = status;
    this.retryAfterS = retryAfterS;
  }
}

export class ApiClient {
  constructor(private baseUrl = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError("NETWORK", String(err), 0);
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(
        body.code ?? "UNKNOWN",
        body.message ?? response.statusText,
        response.status,
        body.retry_after_s ?? null,
      );
    }
    return body as T;
  }

  courses(): Promise<CourseSummary[]> {
    return this.request("/api/courses");
  }

  lesson(courseId: string, section: number, lesson: number, student: string): Promise<LessonPayload> {
    const query = new URLSearchParams({ student });
    return this.request(
      `/api/courses/${encodeURIComponent(courseId)}/sections/${section}/lessons/${lesson}?${query}`,
    );
  }

  submit(
    courseId: string,
    student: string,
    exerciseId: string,
    payload: string[] | string,
    nonce: string,
  ): Promise<GradeResponse> {
    return this.request(`/api/courses/${encodeURIComponent(courseId)}/answers`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ student, exercise_id: exerciseId, payload, nonce }),
    });
  }

  progress(student: string, courseId: string): Promise<Progress> {
    const query = new URLSearchParams({ course: courseId });
    return this.request(`/api/students/${encodeURIComponent(student)}/progress?${query}`);
  }
}
