/** DOM builders. Every function renders service payloads verbatim —
 * nothing here computes domain facts, it only lays them out. */

import type {
  Comparison,
  PhsDetail,
  PhsRow,
  Report,
  ReviewState,
  ReviewStatus,
} from "./types.js";
import { TARGET_KINDS } from "./types.js";

export const STATUS_LABELS: Record<ReviewStatus, string> = {
  generated: "awaiting review",
  hazardous: "hazardous",
  not_hazardous: "not hazardous",
};

export const TARGET_LABELS: Record<string, string> = {
  other_traffic_participant: "other traffic participants",
  passengers: "passengers",
  infrastructure_law: "infrastructure / legal",
  other: "other",
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderRowList(
  doc: Document,
  rows: readonly PhsRow[],
  selectedId: string | undefined,
  onSelect: (id: string) => void,
): HTMLElement {
  const list = el(doc, "ul", "phs-list");
  for (const row of rows) {
    const item = el(doc, "li", `phs-item status-${row.review.status}`);
    item.dataset.id = row.id;
    if (row.id === selectedId) item.classList.add("selected");
    const label = el(doc, "span", "phs-label", row.instance_label);
    const where = el(doc, "span", "phs-where", row.segment);
    const status = el(
      doc,
      "span",
      "phs-status",
      STATUS_LABELS[row.review.status],
    );
    if (row.hazard_ids.length > 0) {
      status.textContent += ` · ${row.hazard_ids.length} hazard${
        row.hazard_ids.length > 1 ? "s" : ""
      }`;
    }
    item.append(where, label, status);
    item.addEventListener("click", () => onSelect(row.id));
    list.append(item);
  }
  return list;
}

export interface DecisionFormRefs {
  root: HTMLElement;
  hazardousButton: HTMLButtonElement;
  notHazardousButton: HTMLButtonElement;
  rationale: HTMLInputElement;
  save: HTMLButtonElement;
}

/** The decision controls carry the row version they were rendered from in
 * `data-version`; saves must read it back from the DOM so the version the
 * reviewer saw is exactly the version the service is asked to expect. */
export function renderDecisionForm(
  doc: Document,
  detail: PhsDetail,
  staged: ReviewStatus | null,
): DecisionFormRefs {
  const root = el(doc, "div", "decision-form");
  root.dataset.version = String(detail.review.version);
  root.dataset.phs = detail.id;

  const hazardousButton = el(doc, "button", "btn-hazardous", "hazardous (h)");
  const notHazardousButton = el(
    doc,
    "button",
    "btn-not-hazardous",
    "not hazardous (n)",
  );
  if (staged === "hazardous") hazardousButton.classList.add("staged");
  if (staged === "not_hazardous") notHazardousButton.classList.add("staged");

  const rationale = el(doc, "input", "rationale-input");
  rationale.placeholder = "rationale (required for: not hazardous)";
  rationale.value = detail.review.rationale;

  const save = el(doc, "button", "btn-save", "save decision (enter)");

  root.append(hazardousButton, notHazardousButton, rationale, save);
  return { root, hazardousButton, notHazardousButton, rationale, save };
}

export function renderDetail(doc: Document, detail: PhsDetail): HTMLElement {
  const pane = el(doc, "div", "detail");
  pane.append(
    el(doc, "h2", "detail-title", detail.instance_label),
    el(
      doc,
      "p",
      "detail-context",
      `${detail.scenario_title ?? detail.scenario} — segment ` +
        `${detail.segment}` +
        (detail.segment_order !== undefined
          ? ` (step ${detail.segment_order})`
          : ""),
    ),
  );
  if (detail.desired_behavior) {
    pane.append(
      el(doc, "p", "detail-desired", `Desired: ${detail.desired_behavior}`),
    );
  }
  if (detail.deviation_label) {
    pane.append(
      el(
        doc,
        "p",
        "detail-deviation",
        `Deviation class: ${detail.deviation_label}`,
      ),
    );
  }
  if (detail.source_malfunction) {
    pane.append(
      el(
        doc,
        "p",
        "detail-malfunction",
        `Source malfunction: ${detail.source_malfunction}`,
      ),
    );
  }
  pane.append(
    el(
      doc,
      "p",
      "detail-review",
      `Review: ${STATUS_LABELS[detail.review.status]} (v${detail.review.version})` +
        (detail.review.rationale ? ` — ${detail.review.rationale}` : ""),
    ),
  );
  if (detail.hazards.length > 0) {
    const list = el(doc, "ul", "hazard-list");
    for (const hazard of detail.hazards) {
      list.append(
        el(
          doc,
          "li",
          "hazard-item",
          `${hazard.source} → ${hazard.target} ` +
            `[${TARGET_LABELS[hazard.target_kind] ?? hazard.target_kind}]: ` +
            hazard.initiating_mechanism,
        ),
      );
    }
    pane.append(el(doc, "h3", undefined, "Hazards"), list);
  }
  return pane;
}

export interface HazardFields {
  source: string;
  target: string;
  initiating_mechanism: string;
}

/** Client-side mirror of the service rule: all three legs non-empty. */
export function validateHazard(
  fields: HazardFields,
): Partial<Record<keyof HazardFields, string>> {
  const errors: Partial<Record<keyof HazardFields, string>> = {};
  for (const leg of ["source", "target", "initiating_mechanism"] as const) {
    if (!fields[leg].trim()) errors[leg] = "required";
  }
  return errors;
}

export interface HazardFormRefs {
  root: HTMLElement;
  source: HTMLInputElement;
  target: HTMLInputElement;
  mechanism: HTMLInputElement;
  description: HTMLInputElement;
  kind: HTMLSelectElement;
  submit: HTMLButtonElement;
  errors: HTMLElement;
}

export function renderHazardForm(doc: Document, phsId: string): HazardFormRefs {
  const root = el(doc, "form", "hazard-form");
  root.dataset.phs = phsId;
  const heading = el(doc, "h3", undefined, "New hazard");

  const source = el(doc, "input", "hazard-source");
  source.placeholder = "source (deviating behavior)";
  const target = el(doc, "input", "hazard-target");
  target.placeholder = "target (who or what is endangered)";
  const mechanism = el(doc, "input", "hazard-mechanism");
  mechanism.placeholder = "initiating mechanism";
  const description = el(doc, "input", "hazard-description");
  description.placeholder = "description (optional)";

  const kind = el(doc, "select", "hazard-kind");
  for (const value of TARGET_KINDS) {
    const option = el(doc, "option", undefined, TARGET_LABELS[value] ?? value);
    option.value = value;
    kind.append(option);
  }

  const submit = el(doc, "button", "btn-create-hazard", "create hazard");
  submit.type = "submit";
  const errors = el(doc, "div", "hazard-errors");

  root.append(heading, source, target, mechanism, description, kind, submit, errors);
  return { root, source, target, mechanism, description, kind, submit, errors };
}

export function renderConflictBanner(
  doc: Document,
  phsId: string,
  committed: ReviewState,
): HTMLElement {
  const banner = el(doc, "div", "conflict-banner");
  banner.setAttribute("role", "alert");
  banner.append(
    el(
      doc,
      "span",
      "conflict-text",
      `Conflict: row ${phsId} was changed in another session — now ` +
        `${STATUS_LABELS[committed.status]} (v${committed.version}` +
        (committed.reviewer ? ` by ${committed.reviewer}` : "") +
        `). The row has been refreshed; apply your decision again if it still holds.`,
    ),
  );
  const dismiss = el(doc, "button", "conflict-dismiss", "dismiss (esc)");
  banner.append(dismiss);
  return banner;
}

function comparisonLines(name: string, c: Comparison): string[] {
  const ratio = Number(c.reduction_ratio).toFixed(1);
  const lines = [
    `${c.malfunction_route_total} malfunction-route vs ` +
      `${c.deviation_route_total} deviation-route (${ratio}x)`,
    `distinct behaviors: ${c.distinct_behaviors}; applicable malfunction ` +
      `rows: ${c.malfunction_route_applicable}; coverage gaps: ` +
      `${c.coverage_gaps.length}`,
  ];
  if (c.unmapped_malfunctions.length > 0) {
    lines.push(`unmapped malfunctions: ${c.unmapped_malfunctions.join(", ")}`);
  }
  return lines;
}

export function renderReport(doc: Document, report: Report): HTMLElement {
  const pane = el(doc, "div", "report");
  pane.append(
    el(doc, "h2", undefined, `Report — ${report.project}`),
    el(
      doc,
      "p",
      "report-totals",
      `rows: ${report.total_phs} · hazards: ${report.total_hazards} · ` +
        `decisions: ${report.decisions_recorded} · store v${report.store_version}`,
    ),
  );

  const statuses = el(doc, "ul", "report-statuses");
  for (const [status, count] of Object.entries(report.status_counts)) {
    statuses.append(
      el(
        doc,
        "li",
        `report-status-${status}`,
        `${STATUS_LABELS[status as ReviewStatus] ?? status}: ${count}`,
      ),
    );
  }
  pane.append(el(doc, "h3", undefined, "Review status"), statuses);

  const targets = el(doc, "ul", "report-targets");
  for (const [kind, count] of Object.entries(report.hazards_by_target)) {
    targets.append(
      el(
        doc,
        "li",
        `report-target-${kind}`,
        `${TARGET_LABELS[kind] ?? kind}: ${count}`,
      ),
    );
  }
  pane.append(el(doc, "h3", undefined, "Hazards by target"), targets);

  for (const [scenario, labels] of Object.entries(report.scenario_deviations)) {
    const list = el(doc, "ul", "report-deviations");
    for (const label of labels) list.append(el(doc, "li", undefined, label));
    pane.append(
      el(doc, "h3", undefined, `Deviations in ${scenario} (${labels.length})`),
      list,
    );
  }

  for (const [name, comparison] of Object.entries(report.comparisons)) {
    const block = el(doc, "div", "report-comparison");
    block.append(el(doc, "h3", undefined, `Strategy comparison — ${name}`));
    for (const line of comparisonLines(name, comparison)) {
      block.append(el(doc, "p", "comparison-line", line));
    }
    pane.append(block);
  }

  if (report.orphaned.length > 0) {
    pane.append(
      el(
        doc,
        "p",
        "report-orphaned",
        `Orphaned references: ${report.orphaned.join(", ")}`,
      ),
    );
  }
  return pane;
}
