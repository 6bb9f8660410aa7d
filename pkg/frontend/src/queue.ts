/** Triage-queue selection state. Pure UI navigation: the rows themselves
 * are service payloads and are only ever replaced by fresher service
 * payloads, never synthesized here. */

import type { PhsRow, ReviewState } from "./types.js";

export class Queue {
  private rows: PhsRow[] = [];
  private index = 0;

  get all(): readonly PhsRow[] {
    return this.rows;
  }

  get length(): number {
    return this.rows.length;
  }

  get current(): PhsRow | undefined {
    return this.rows[this.index];
  }

  get position(): number {
    return this.index;
  }

  /** Replace the row set from a fresh listing, keeping the selection on
   * the same row id when it survives. */
  replaceAll(rows: PhsRow[]): void {
    const selected = this.current?.id;
    this.rows = rows;
    const kept = selected ? rows.findIndex((r) => r.id === selected) : -1;
    this.index = kept >= 0 ? kept : Math.min(this.index, Math.max(0, rows.length - 1));
  }

  next(): PhsRow | undefined {
    if (this.index < this.rows.length - 1) this.index += 1;
    return this.current;
  }

  prev(): PhsRow | undefined {
    if (this.index > 0) this.index -= 1;
    return this.current;
  }

  select(id: string): PhsRow | undefined {
    const at = this.rows.findIndex((r) => r.id === id);
    if (at >= 0) this.index = at;
    return this.current;
  }

  /** First row still awaiting a decision, if any. */
  firstUndecided(): PhsRow | undefined {
    return this.rows.find((r) => r.review.status === "generated");
  }

  /** Overwrite one row's review state with what the service committed. */
  applyReview(id: string, review: ReviewState): void {
    const row = this.rows.find((r) => r.id === id);
    if (row) row.review = review;
  }

  /** Overwrite one row's hazard listing with what the service reported. */
  applyHazardIds(id: string, hazardIds: string[]): void {
    const row = this.rows.find((r) => r.id === id);
    if (row) row.hazard_ids = hazardIds;
  }
}
