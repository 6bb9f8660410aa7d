/** The review application: a triage queue, a hazard form, and a report
 * view over the service API. Every displayed fact comes from a service
 * payload; the only state owned here is navigation and staging. */

import { ApiClient, ApiError, ConflictError } from "./api.js";
import { Queue } from "./queue.js";
import type {
  PhsDetail,
  Report,
  ReviewState,
  ReviewStatus,
  TargetKind,
} from "./types.js";
import {
  renderConflictBanner,
  renderDecisionForm,
  renderDetail,
  renderHazardForm,
  renderReport,
  renderRowList,
  validateHazard,
  type DecisionFormRefs,
  type HazardFormRefs,
} from "./view.js";

export class App {
  private readonly queue = new Queue();
  private detail: PhsDetail | null = null;
  private staged: ReviewStatus | null = null;
  private view: "queue" | "report" = "queue";
  private report: Report | null = null;
  private hazardFormOpen = false;
  private conflict: { phs: string; current: ReviewState } | null = null;
  private notice = "";
  private projectName = "";
  private decisionRefs: DecisionFormRefs | null = null;
  private hazardRefs: HazardFormRefs | null = null;
  private lastOp: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly reviewer = "ui",
  ) {}

  private get doc(): Document {
    return this.root.ownerDocument;
  }

  /** Await the most recent asynchronous action (used by tests). */
  idle(): Promise<void> {
    return this.lastOp;
  }

  private track(op: Promise<void>): void {
    this.lastOp = op.catch((err: unknown) => {
      this.notice = err instanceof Error ? err.message : String(err);
      this.render();
    });
  }

  async start(): Promise<void> {
    this.doc.addEventListener("keydown", this.onKey);
    const summary = await this.api.project();
    this.projectName = summary.name;
    await this.refreshRows();
    const first = this.queue.firstUndecided() ?? this.queue.current;
    if (first) this.queue.select(first.id);
    await this.openCurrent();
  }

  /** Detach document-level listeners (tests and teardown). */
  stop(): void {
    this.doc.removeEventListener("keydown", this.onKey);
  }

  private async refreshRows(): Promise<void> {
    this.queue.replaceAll(await this.api.listPhs());
  }

  private async openCurrent(): Promise<void> {
    const current = this.queue.current;
    if (!current) {
      this.detail = null;
      this.render();
      return;
    }
    this.detail = await this.api.phsDetail(current.id);
    this.queue.applyReview(this.detail.id, this.detail.review);
    this.queue.applyHazardIds(this.detail.id, this.detail.hazard_ids);
    this.render();
  }

  private move(direction: 1 | -1): void {
    if (direction === 1) this.queue.next();
    else this.queue.prev();
    this.staged = null;
    this.hazardFormOpen = false;
    this.track(this.openCurrent());
  }

  private stage(status: ReviewStatus): void {
    if (!this.detail) return;
    this.staged = status;
    const typed = this.decisionRefs?.rationale.value;
    this.render();
    if (typed !== undefined && this.decisionRefs) {
      this.decisionRefs.rationale.value = typed;
    }
    if (status === "not_hazardous") this.decisionRefs?.rationale.focus();
  }

  /** Commit the staged decision. The expected version is read back from
   * the rendered DOM, so what the reviewer saw is exactly what is sent. */
  async saveDecision(): Promise<void> {
    const refs = this.decisionRefs;
    if (!refs || !this.staged) return;
    const phsId = refs.root.dataset.phs ?? "";
    const displayedVersion = Number(refs.root.dataset.version);
    this.notice = "";
    try {
      const result = await this.api.decide(phsId, {
        new_status: this.staged,
        expected_version: displayedVersion,
        rationale: refs.rationale.value,
        reviewer: this.reviewer,
      });
      const { phs, ...review } = result;
      this.queue.applyReview(phs, review);
      this.staged = null;
      await this.openCurrent();
    } catch (err) {
      if (err instanceof ConflictError) {
        this.conflict = { phs: err.phs, current: err.current };
        this.queue.applyReview(err.phs, err.current);
        this.staged = null;
        await this.openCurrent();
        return;
      }
      if (err instanceof ApiError) {
        this.notice = err.message;
        this.render();
        return;
      }
      throw err;
    }
  }

  async submitHazard(): Promise<void> {
    const refs = this.hazardRefs;
    const detail = this.detail;
    if (!refs || !detail) return;
    const fields = {
      source: refs.source.value,
      target: refs.target.value,
      initiating_mechanism: refs.mechanism.value,
    };
    const errors = validateHazard(fields);
    if (Object.keys(errors).length > 0) {
      refs.errors.textContent = Object.entries(errors)
        .map(([leg, problem]) => `${leg}: ${problem}`)
        .join("; ");
      return;
    }
    this.notice = "";
    try {
      await this.api.createHazard({
        phs_id: detail.id,
        ...fields,
        description: refs.description.value,
        target_kind: refs.kind.value as TargetKind,
      });
      this.hazardFormOpen = false;
      await this.openCurrent();
    } catch (err) {
      if (err instanceof ApiError) {
        refs.errors.textContent = err.message;
        return;
      }
      throw err;
    }
  }

  async showReport(): Promise<void> {
    this.report = await this.api.report();
    this.view = "report";
    this.render();
  }

  private onKey = (event: KeyboardEvent): void => {
    const target = event.target as HTMLElement | null;
    const typing =
      target !== null &&
      ["INPUT", "TEXTAREA", "SELECT"].includes(target.tagName);

    if (event.key === "Escape") {
      if (this.hazardFormOpen) this.hazardFormOpen = false;
      else if (this.conflict) this.conflict = null;
      this.render();
      return;
    }
    if (typing) {
      if (event.key === "Enter" && target) {
        event.preventDefault();
        if (target.closest(".hazard-form")) this.track(this.submitHazard());
        else if (target.classList.contains("rationale-input")) {
          this.track(this.saveDecision());
        }
      }
      return;
    }
    switch (event.key) {
      case "j":
      case "ArrowDown":
        this.move(1);
        break;
      case "k":
      case "ArrowUp":
        this.move(-1);
        break;
      case "h":
        this.stage("hazardous");
        break;
      case "n":
        this.stage("not_hazardous");
        break;
      case "Enter":
        this.track(this.saveDecision());
        break;
      case "z":
        if (this.detail?.review.status === "hazardous") {
          this.hazardFormOpen = !this.hazardFormOpen;
          this.render();
        }
        break;
      case "r":
        this.track(this.showReport());
        break;
      case "q":
        this.view = "queue";
        this.render();
        break;
      default:
        break;
    }
  };

  render(): void {
    const doc = this.doc;
    this.root.textContent = "";
    this.decisionRefs = null;
    this.hazardRefs = null;

    const header = doc.createElement("header");
    const title = doc.createElement("h1");
    title.textContent = `hazlab review — ${this.projectName}`;
    const tabs = doc.createElement("nav");
    const queueTab = doc.createElement("button");
    queueTab.className = "tab-queue";
    queueTab.textContent = "queue (q)";
    queueTab.addEventListener("click", () => {
      this.view = "queue";
      this.render();
    });
    const reportTab = doc.createElement("button");
    reportTab.className = "tab-report";
    reportTab.textContent = "report (r)";
    reportTab.addEventListener("click", () => this.track(this.showReport()));
    tabs.append(queueTab, reportTab);
    header.append(title, tabs);
    this.root.append(header);

    if (this.conflict) {
      const banner = renderConflictBanner(
        doc,
        this.conflict.phs,
        this.conflict.current,
      );
      banner
        .querySelector(".conflict-dismiss")
        ?.addEventListener("click", () => {
          this.conflict = null;
          this.render();
        });
      this.root.append(banner);
    }
    if (this.notice) {
      const notice = doc.createElement("div");
      notice.className = "notice";
      notice.textContent = this.notice;
      this.root.append(notice);
    }

    if (this.view === "report" && this.report) {
      this.root.append(renderReport(doc, this.report));
      return;
    }

    const main = doc.createElement("div");
    main.className = "queue-view";
    main.append(
      renderRowList(doc, this.queue.all, this.queue.current?.id, (id) => {
        this.queue.select(id);
        this.staged = null;
        this.hazardFormOpen = false;
        this.track(this.openCurrent());
      }),
    );

    const pane = doc.createElement("div");
    pane.className = "detail-pane";
    if (this.detail) {
      pane.append(renderDetail(doc, this.detail));

      const refs = renderDecisionForm(doc, this.detail, this.staged);
      refs.hazardousButton.addEventListener("click", () =>
        this.stage("hazardous"),
      );
      refs.notHazardousButton.addEventListener("click", () =>
        this.stage("not_hazardous"),
      );
      refs.save.addEventListener("click", () =>
        this.track(this.saveDecision()),
      );
      this.decisionRefs = refs;
      pane.append(refs.root);

      if (this.detail.review.status === "hazardous") {
        if (this.hazardFormOpen) {
          const hazard = renderHazardForm(doc, this.detail.id);
          hazard.root.addEventListener("submit", (event) => {
            event.preventDefault();
            this.track(this.submitHazard());
          });
          this.hazardRefs = hazard;
          pane.append(hazard.root);
        } else {
          const hint = doc.createElement("p");
          hint.className = "hazard-hint";
          hint.textContent = "press z to add a hazard";
          pane.append(hint);
        }
      }
    } else {
      const empty = doc.createElement("p");
      empty.className = "empty";
      empty.textContent = "no rows in this project";
      pane.append(empty);
    }
    main.append(pane);
    this.root.append(main);
  }
}
