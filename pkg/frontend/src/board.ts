// DOM rendering for the session board. Pure function of the view state:
// render(container, state, dispatch) rebuilds the board; nothing shown is
// computed client-side beyond formatting of snapshot fields.

import type { Action, ViewState } from "./state.js";
import type { Conflict, Snapshot, TreeNode, TriState } from "./types.js";

export type Dispatch = (action: Action) => void;
export type MemberSelect = (member: string) => void;

export function render(
  container: HTMLElement,
  state: ViewState,
  dispatch: Dispatch,
  selectMember: MemberSelect,
): void {
  container.textContent = "";
  const snapshot = state.snapshot;
  if (!snapshot) {
    container.append(el("p", { class: "loading" }, "loading session..."));
    if (state.error) container.append(banner(state.error, dispatch));
    return;
  }
  if (state.error) container.append(banner(state.error, dispatch));
  if (state.notice) container.append(el("div", { class: "notice" }, state.notice));

  container.append(header(snapshot, state, dispatch, selectMember));
  container.append(nextConstraintCard(state));

  const columns = el("div", { class: "columns" });
  columns.append(featureTree(snapshot, state, dispatch));
  const side = el("div", { class: "side" });
  side.append(conflictPanel(snapshot, state, dispatch));
  side.append(diagnosisPanel(snapshot, dispatch));
  side.append(reconfigurePanel(snapshot, dispatch));
  columns.append(side);
  container.append(columns);
}

function banner(message: string, dispatch: Dispatch): HTMLElement {
  const retry = el("button", { class: "retry" }, "retry");
  retry.addEventListener("click", () => dispatch({ kind: "step" }));
  const div = el("div", { class: "error-banner", role: "alert" }, `service error: ${message} `);
  div.append(retry);
  return div;
}

function header(
  snapshot: Snapshot,
  state: ViewState,
  dispatch: Dispatch,
  selectMember: MemberSelect,
): HTMLElement {
  const head = el("header", { class: "board-header" });
  head.append(el("h1", {}, `${snapshot.model.name} - session ${snapshot.id}`));

  const phase = el("span", { class: `phase phase-${snapshot.phase}`, "data-phase": snapshot.phase },
    `phase: ${snapshot.phase}`);
  head.append(phase);
  head.append(el("span", { class: "version", "data-version": String(snapshot.version) },
    `v${snapshot.version}`));

  const picker = el("select", { class: "member-picker" }) as HTMLSelectElement;
  for (const member of snapshot.members) {
    const option = el("option", { value: member }, member) as HTMLOptionElement;
    option.selected = member === state.activeMember;
    picker.append(option);
  }
  picker.addEventListener("change", () => selectMember(picker.value));
  head.append(label("acting as", picker));

  const stepButton = el("button", { class: "step" }, "step");
  stepButton.addEventListener("click", () => dispatch({ kind: "step" }));
  head.append(stepButton);
  return head;
}

function nextConstraintCard(state: ViewState): HTMLElement {
  const card = el("div", { class: "next-constraint" });
  const next = state.nextConstraint;
  const snapshot = state.snapshot;
  if (!next || next.constraint === null || !snapshot) {
    card.append(el("p", {}, "next constraint: none"));
    return card;
  }
  const constraint = snapshot.model.constraints.find((c) => c.id === next.constraint);
  card.append(
    el("p", {}, `next constraint to visit: c${next.constraint} ${constraint?.text ?? ""}`),
  );
  if (next.tie_break_used && next.tie_break_used !== "none") {
    card.append(el("small", {}, `tie broken by ${next.tie_break_used}`));
  }
  return card;
}

const TRI_STATES: TriState[] = ["include", "exclude", "unstated"];

function featureTree(snapshot: Snapshot, state: ViewState, dispatch: Dispatch): HTMLElement {
  const member = state.activeMember;
  const panel = el("section", { class: "feature-tree" });
  panel.append(el("h2", {}, "features"));

  const byParent = new Map<string | null, TreeNode[]>();
  for (const node of snapshot.model.tree) {
    const list = byParent.get(node.parent) ?? [];
    list.push(node);
    byParent.set(node.parent, list);
  }

  const renderNode = (node: TreeNode): HTMLElement => {
    const item = el("li", { class: "feature", "data-feature": node.feature });
    const row = el("div", { class: "feature-row" });
    row.append(el("span", { class: "feature-name" }, node.feature));
    row.append(el("small", { class: "relation" }, node.relation));

    const decided = snapshot.decisions[node.feature];
    if (decided) {
      row.append(el("span", { class: `decision decision-${decided}` }, `group: ${decided}`));
    }
    if (member) {
      row.append(triStateControl(snapshot, member, node.feature, dispatch));
    }
    item.append(row);
    const children = byParent.get(node.feature) ?? [];
    if (children.length) {
      const sub = el("ul", { class: "children" });
      for (const child of children) sub.append(renderNode(child));
      item.append(sub);
    }
    return item;
  };

  const rootList = el("ul", { class: "tree-root" });
  for (const node of byParent.get(null) ?? []) rootList.append(renderNode(node));
  panel.append(rootList);
  return panel;
}

function triStateControl(
  snapshot: Snapshot,
  member: string,
  feature: string,
  dispatch: Dispatch,
): HTMLElement {
  const stated = snapshot.stated[member]?.[feature];
  const predicted = snapshot.predicted[member]?.[feature];
  const control = el("span", { class: "tristate", "data-feature": feature });
  for (const value of TRI_STATES) {
    const active = stated ? stated === value : value === "unstated";
    const button = el(
      "button",
      { class: `tri ${active ? "active" : ""}`, "data-value": value, title: `${feature}: ${value}` },
      value === "include" ? "+" : value === "exclude" ? "-" : "?",
    );
    button.addEventListener("click", () => dispatch({ kind: "set_pref", feature, value }));
    control.append(button);
  }
  if (stated === undefined && predicted !== undefined) {
    const value = predicted >= snapshot.prediction_threshold ? "include" : "exclude";
    control.append(
      el("span", { class: "badge predicted" }, `predicted ${value} (${predicted.toFixed(2)})`),
    );
  }
  return control;
}

function conflictPanel(snapshot: Snapshot, state: ViewState, dispatch: Dispatch): HTMLElement {
  const panel = el("section", { class: "conflicts" });
  panel.append(el("h2", {}, `conflicts (${snapshot.conflicts.length})`));
  if (!snapshot.conflicts.length) {
    panel.append(el("p", { class: "empty" }, "no conflicts"));
    return panel;
  }
  for (const conflict of snapshot.conflicts) {
    panel.append(conflictCard(snapshot, conflict, state, dispatch));
  }
  return panel;
}

function conflictCard(
  snapshot: Snapshot,
  conflict: Conflict,
  state: ViewState,
  dispatch: Dispatch,
): HTMLElement {
  const card = el("div", {
    class: `conflict-card ${conflict.status}`,
    "data-feature": conflict.feature,
    "data-status": conflict.status,
  });
  const title =
    conflict.status === "resolved"
      ? `${conflict.feature} - resolved: ${conflict.resolved_value}`
      : `${conflict.feature} - open`;
  card.append(el("h3", {}, title));

  const positions = el("ul", { class: "positions" });
  for (const [member, value] of Object.entries(conflict.positions)) {
    const provenance = conflict.provenance[member];
    positions.append(
      el("li", { "data-member": member }, `${member}: ${value} (${provenance})`),
    );
  }
  card.append(positions);

  if (conflict.status === "open") {
    const patterns = state.patterns[conflict.feature] ?? [];
    if (patterns.length) {
      const list = el("ul", { class: "patterns" });
      for (const pattern of patterns) {
        list.append(el("li", { class: `pattern ${pattern.kind}` }, pattern.text));
      }
      card.append(list);
    }

    for (const proposal of snapshot.proposals.filter((p) => p.feature === conflict.feature)) {
      const row = el("div", { class: "proposal", "data-proposal": proposal.id });
      row.append(
        el(
          "span",
          {},
          `${proposal.proposer} proposes ${proposal.value}` +
            (proposal.rationale ? ` - ${proposal.rationale}` : "") +
            ` [${proposal.acceptances.length}/${snapshot.members.length} accepted]`,
        ),
      );
      const acceptButton = el("button", { class: "accept" }, "accept");
      acceptButton.addEventListener("click", () =>
        dispatch({ kind: "accept", proposalId: proposal.id }),
      );
      row.append(acceptButton);
      card.append(row);
    }

    const form = el("div", { class: "propose-form" });
    const value = el("select", { class: "propose-value" }) as HTMLSelectElement;
    value.append(el("option", { value: "include" }, "include"));
    value.append(el("option", { value: "exclude" }, "exclude"));
    const rationale = el("input", {
      class: "propose-rationale",
      placeholder: "rationale",
    }) as HTMLInputElement;
    const submit = el("button", { class: "propose" }, "propose");
    submit.addEventListener("click", () =>
      dispatch({
        kind: "propose",
        feature: conflict.feature,
        value: value.value as "include" | "exclude",
        rationale: rationale.value,
      }),
    );
    form.append(value, rationale, submit);
    card.append(form);
  }
  return card;
}

function diagnosisPanel(snapshot: Snapshot, dispatch: Dispatch): HTMLElement {
  const panel = el("section", { class: "diagnoses" });
  const rows = snapshot.diagnoses.diagnoses;
  panel.append(el("h2", {}, `diagnoses (${rows.length})`));
  if (snapshot.diagnoses.complete === false) {
    panel.append(el("p", { class: "truncated" }, "enumeration truncated: more repairs may exist"));
  }
  if (!rows.length) {
    panel.append(el("p", { class: "empty" }, "no diagnoses"));
    return panel;
  }
  rows.forEach((row, index) => {
    const card = el("div", { class: "diagnosis-row", "data-index": String(index) });
    const retract = row.retract
      .map((d) => `${d.value === "include" ? "drop include of" : "drop exclude of"} ${d.feature}`)
      .join(", ");
    card.append(el("span", { class: "retract" }, retract));
    card.append(el("span", { class: "score" }, ` max adaptations: ${row.group_score ?? "?"}`));
    if (row.member_adaptations) {
      const counts = Object.entries(row.member_adaptations)
        .map(([member, count]) => `${member}: ${count}`)
        .join(", ");
      card.append(el("small", { class: "adaptations" }, ` (${counts})`));
    }
    const apply = el("button", { class: "apply" }, "apply");
    apply.addEventListener("click", () => dispatch({ kind: "apply_diagnosis", index }));
    card.append(apply);
    panel.append(card);
  });
  return panel;
}

function reconfigurePanel(snapshot: Snapshot, dispatch: Dispatch): HTMLElement {
  const panel = el("section", { class: "reconfigure" });
  panel.append(el("h2", {}, "reconfigure"));

  const featureName = el("input", { class: "new-feature", placeholder: "feature" }) as HTMLInputElement;
  const parent = el("select", { class: "new-parent" }) as HTMLSelectElement;
  for (const f of snapshot.model.features) parent.append(el("option", { value: f }, f));
  const relation = el("select", { class: "new-relation" }) as HTMLSelectElement;
  relation.append(el("option", { value: "optional" }, "optional"));
  relation.append(el("option", { value: "mandatory" }, "mandatory"));
  const addFeature = el("button", { class: "add-feature" }, "add feature");
  addFeature.addEventListener("click", () => {
    if (!featureName.value) return;
    dispatch({
      kind: "reconfigure",
      changes: [
        {
          kind: "add_feature",
          feature: featureName.value,
          parent: parent.value,
          relation: relation.value as "mandatory" | "optional",
        },
      ],
    });
  });
  panel.append(el("div", { class: "add-feature-form" }, featureName, parent, relation, addFeature));

  const expr = el("input", {
    class: "new-constraint",
    placeholder: "(not (and A B))",
  }) as HTMLInputElement;
  const addConstraint = el("button", { class: "add-constraint" }, "add constraint");
  addConstraint.addEventListener("click", () => {
    if (!expr.value) return;
    dispatch({ kind: "reconfigure", changes: [{ kind: "add_constraint", expr: expr.value }] });
  });
  panel.append(el("div", { class: "add-constraint-form" }, expr, addConstraint));
  return panel;
}

function label(text: string, control: HTMLElement): HTMLElement {
  const wrap = el("label", { class: "labelled" }, `${text}: `);
  wrap.append(control);
  return wrap;
}

function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: (string | HTMLElement)[]
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (value) node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}
