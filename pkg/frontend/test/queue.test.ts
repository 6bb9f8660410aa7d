import { describe, expect, it } from "vitest";

import { Queue } from "../src/queue.js";
import type { PhsRow, ReviewStatus } from "../src/types.js";

function row(id: string, status: ReviewStatus = "generated"): PhsRow {
  return {
    id,
    segment: "approach",
    origin: "deviation_route",
    deviation: "improper_acceleration",
    instance_label: `label ${id}`,
    source_malfunction: null,
    review: {
      status,
      rationale: "",
      reviewer: "",
      decided_at: "",
      version: 1,
    },
    scenario: "demo",
    hazard_ids: [],
  };
}

describe("queue navigation", () => {
  it("starts on the first row and clamps at both ends", () => {
    const queue = new Queue();
    queue.replaceAll([row("a"), row("b"), row("c")]);
    expect(queue.current?.id).toBe("a");
    expect(queue.prev()?.id).toBe("a");
    queue.next();
    queue.next();
    expect(queue.current?.id).toBe("c");
    expect(queue.next()?.id).toBe("c");
  });

  it("selects by id and reports position", () => {
    const queue = new Queue();
    queue.replaceAll([row("a"), row("b"), row("c")]);
    expect(queue.select("b")?.id).toBe("b");
    expect(queue.position).toBe(1);
    expect(queue.select("missing")?.id).toBe("b");
  });

  it("keeps the selection across a refresh when the id survives", () => {
    const queue = new Queue();
    queue.replaceAll([row("a"), row("b"), row("c")]);
    queue.select("c");
    queue.replaceAll([row("b"), row("c"), row("d")]);
    expect(queue.current?.id).toBe("c");
  });

  it("falls back to a valid index when the selected row vanishes", () => {
    const queue = new Queue();
    queue.replaceAll([row("a"), row("b"), row("c")]);
    queue.select("c");
    queue.replaceAll([row("a")]);
    expect(queue.current?.id).toBe("a");
  });

  it("finds the first undecided row", () => {
    const queue = new Queue();
    queue.replaceAll([
      row("a", "hazardous"),
      row("b", "not_hazardous"),
      row("c"),
      row("d"),
    ]);
    expect(queue.firstUndecided()?.id).toBe("c");
  });

  it("applies committed review state and hazard listings in place", () => {
    const queue = new Queue();
    queue.replaceAll([row("a"), row("b")]);
    queue.applyReview("b", {
      status: "hazardous",
      rationale: "",
      reviewer: "r",
      decided_at: "t",
      version: 2,
    });
    queue.applyHazardIds("b", ["hz-1"]);
    const updated = queue.all.find((r) => r.id === "b");
    expect(updated?.review.version).toBe(2);
    expect(updated?.review.status).toBe("hazardous");
    expect(updated?.hazard_ids).toEqual(["hz-1"]);
  });
});
