import { afterEach, describe, expect, it, vi } from "vitest";

import { CmPlayer, TsPlayer, renderCourseMap, renderHud, renderLockout } from "../src/render.js";
import type { CmExercise, CourseSummary, Progress, TsExercise } from "../src/types.js";

const course: CourseSummary = {
  id: "c",
  language: "Guajajara",
  sections: [
    { subject: "food", lessons: 4 },
    { subject: "animal", lessons: 4 },
  ],
};

const progress: Progress = {
  student_id: "s",
  course_id: "c",
  cursor: { section: 0, lesson: 0 },
  lesson_run: null,
  gems: { current: 2, max: 3 },
  streak: { days: 4, last_active_date: "2026-08-08" },
  quest: { done: 1, target: 2, date: "2026-08-08" },
  completed: false,
  lockout_remaining_s: 0,
};

const tsExercise: TsExercise = {
  id: "ts1:t1",
  kind: "TS1",
  prompt: "ela foi buscar cará",
  bank: ["ipiaromo", "oho", "zuze", "kara"],
};

const cmExercise: CmExercise = {
  id: "cm:t1:1:YAM",
  kind: "CM",
  prompt: "kara",
  options: [
    { concept_id: "MANIOC", gloss: "manioc" },
    { concept_id: "YAM", gloss: "yam" },
    { concept_id: "CACAO", gloss: "cacao" },
    { concept_id: "PINEAPPLE", gloss: "pineapple" },
  ],
};

afterEach(() => {
  document.body.replaceChildren();
});

describe("hud", () => {
  it("shows gems, streak and quest", () => {
    const hud = renderHud(progress);
    expect(hud.querySelector(".hud-gems")?.getAttribute("data-gems")).toBe("2");
    expect(hud.querySelector(".gem-icons")?.textContent).toBe("♦♦♢");
    expect(hud.querySelector(".hud-streak")?.textContent).toContain("4 day streak");
    expect(hud.querySelector(".hud-quest")?.textContent).toContain("1/2");
  });
});

describe("course map", () => {
  it("renders sections in order with one current node", () => {
    const map = renderCourseMap(course, progress, () => {});
    const subjects = [...map.querySelectorAll(".section-subject")].map((n) => n.textContent);
    expect(subjects).toEqual(["food", "animal"]);
    expect(map.querySelectorAll(".lesson-node.current")).toHaveLength(1);
    expect(map.querySelectorAll(".lesson-node.locked")).toHaveLength(7);
  });

  it("locked nodes are disabled and do not fire", () => {
    const opened: number[][] = [];
    const map = renderCourseMap(course, progress, (s, l) => opened.push([s, l]));
    const locked = map.querySelector<HTMLButtonElement>(".lesson-node.locked")!;
    locked.click();
    expect(locked.disabled).toBe(true);
    const current = map.querySelector<HTMLButtonElement>(".lesson-node.current")!;
    current.click();
    expect(opened).toEqual([[0, 0]]);
  });
});

describe("translate-sentence player", () => {
  function bankButton(player: TsPlayer, token: string): HTMLButtonElement {
    const buttons = [...player.root.querySelectorAll<HTMLButtonElement>(".bank-token")];
    const hit = buttons.find((b) => b.textContent === token && !b.disabled);
    if (!hit) throw new Error(`no enabled bank token ${token}`);
    return hit;
  }

  it("taps build the ordered answer and submit posts it", () => {
    const submitted: (string[] | string)[] = [];
    const player = new TsPlayer(tsExercise, (payload) => submitted.push(payload));
    document.body.append(player.root);
    for (const token of ["oho", "kara", "ipiaromo"]) {
      bankButton(player, token).click();
    }
    const strip = [...player.root.querySelectorAll(".strip-token")].map((n) => n.textContent);
    expect(strip).toEqual(["oho", "kara", "ipiaromo"]);
    player.root.querySelector<HTMLButtonElement>(".submit")!.click();
    expect(submitted).toEqual([["oho", "kara", "ipiaromo"]]);
  });

  it("submit is disabled while the strip is empty", () => {
    const player = new TsPlayer(tsExercise, () => {
      throw new Error("must not submit");
    });
    const submit = player.root.querySelector<HTMLButtonElement>(".submit")!;
    expect(submit.disabled).toBe(true);
    submit.click(); // disabled: no handler fires
    bankButton(player, "oho").click();
    expect(submit.disabled).toBe(false);
  });

  it("tapping a strip token returns it to the bank", () => {
    const player = new TsPlayer(tsExercise, () => {});
    bankButton(player, "oho").click();
    bankButton(player, "kara").click();
    player.root.querySelector<HTMLButtonElement>(".strip-token")!.click(); // remove "oho"
    const strip = [...player.root.querySelectorAll(".strip-token")].map((n) => n.textContent);
    expect(strip).toEqual(["kara"]);
    expect(bankButton(player, "oho").disabled).toBe(false);
  });

  it("clearStrip restores the whole bank", () => {
    const player = new TsPlayer(tsExercise, () => {});
    bankButton(player, "oho").click();
    bankButton(player, "kara").click();
    player.clearStrip();
    expect(player.root.querySelectorAll(".strip-token")).toHaveLength(0);
    const disabled = [...player.root.querySelectorAll<HTMLButtonElement>(".bank-token")].filter(
      (b) => b.disabled,
    );
    expect(disabled).toHaveLength(0);
  });
});

describe("concept-match player", () => {
  it("renders gloss cards when the manifest is empty", () => {
    const player = new CmPlayer(cmExercise, {}, () => {});
    expect(player.root.querySelectorAll(".gloss-card")).toHaveLength(4);
    expect(player.root.querySelectorAll("img")).toHaveLength(0);
    expect(player.root.querySelector('[data-concept="YAM"] .gloss-card')?.textContent).toBe("yam");
  });

  it("renders an image when the manifest has the concept", () => {
    const manifest = { YAM: "/assets/yam.png" };
    const player = new CmPlayer(cmExercise, manifest, () => {});
    const yamCard = player.root.querySelector('[data-concept="YAM"]')!;
    expect(yamCard.querySelector("img")?.getAttribute("src")).toBe("/assets/yam.png");
    expect(player.root.querySelectorAll(".gloss-card")).toHaveLength(3);
  });

  it("submits the selected concept id", () => {
    const submitted: (string[] | string)[] = [];
    const player = new CmPlayer(cmExercise, {}, (payload) => submitted.push(payload));
    const submit = player.root.querySelector<HTMLButtonElement>(".submit")!;
    expect(submit.disabled).toBe(true);
    player.root.querySelector<HTMLButtonElement>('[data-concept="YAM"]')!.click();
    expect(submit.disabled).toBe(false);
    submit.click();
    expect(submitted).toEqual(["YAM"]);
  });
});

describe("lockout view", () => {
  it("renders five minutes as 5:00 and counts down to a server re-check", () => {
    vi.useFakeTimers();
    try {
      let expired = 0;
      const view = renderLockout(300, () => (expired += 1));
      expect(view.root.querySelector(".countdown")?.textContent).toBe("5:00");
      vi.advanceTimersByTime(1000);
      expect(view.root.querySelector(".countdown")?.textContent).toBe("4:59");
      vi.advanceTimersByTime(299_000);
      expect(view.root.querySelector(".countdown")?.textContent).toBe("0:00");
      expect(expired).toBe(1);
      vi.advanceTimersByTime(5_000); // interval stopped at zero
      expect(expired).toBe(1);
    } finally {
      vi.useRealTimers();
    }
  });

  it("stop() cancels the ticking", () => {
    vi.useFakeTimers();
    try {
      let expired = 0;
      const view = renderLockout(2, () => (expired += 1));
      view.stop();
      vi.advanceTimersByTime(10_000);
      expect(expired).toBe(0);
    } finally {
      vi.useRealTimers();
    }
  });
});
