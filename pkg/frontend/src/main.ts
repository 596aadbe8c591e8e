import { ApiClient } from "./api";
import { Board, overridePathFor, type BoardState } from "./board";
import type { MatrixRow } from "./types";

// Editable fields on a level column and how to read an edited value.
const LEVEL_FIELDS: {
  key: keyof MatrixRow;
  label: string;
  field?: string;
  editable: boolean;
}[] = [
  { key: "scope_label", label: "TEST SCOPE", field: "scope_label", editable: true },
  { key: "intensity", label: "INTENSITY", field: "intensity", editable: true },
  { key: "environment", label: "ENVIRONMENT", field: "environment", editable: true },
  { key: "staff", label: "STAFF", field: "staff", editable: true },
  { key: "staff_weeks", label: "STAFF WEEKS", editable: false },
  { key: "calendar_weeks", label: "CALENDAR WEEKS", field: "calendar_weeks", editable: true },
  { key: "dre", label: "DRE", field: "dre", editable: true },
  { key: "delivered_defects_display", label: "DELIVERED DEFECTS", editable: false },
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderBanner(state: BoardState, root: HTMLElement): void {
  if (!state.banner) return;
  root.appendChild(el("div", "banner", state.banner));
}

function editableCell(
  board: Board,
  state: BoardState,
  path: string,
  displayed: string
): HTMLElement {
  const cell = el("td", "editable");
  const input = el("input");
  input.value = displayed;
  input.addEventListener("change", () => {
    void board.edit(path, input.value);
  });
  cell.appendChild(input);
  const error = state.cellErrors[path];
  if (error) {
    cell.appendChild(el("div", "cell-error", error));
  }
  return cell;
}

function renderMatrix(board: Board, state: BoardState, root: HTMLElement): void {
  const matrix = state.matrix;
  if (!matrix) return;
  const table = el("table", "risk-matrix");
  const head = el("tr");
  head.appendChild(el("th", undefined, "TEST LEVEL"));
  for (const level of matrix.levels) {
    const th = el("th", state.selectedLevel === level ? "selected" : undefined);
    const button = el("button", "select-level", level);
    button.addEventListener("click", () => {
      void board.edit(overridePathFor("selected-level"), level);
    });
    th.appendChild(button);
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const spec of LEVEL_FIELDS) {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, spec.label));
    for (const row of matrix.rows) {
      const value = String(row[spec.key]);
      if (spec.editable && spec.field) {
        const path = overridePathFor("level-field", row.level, spec.field);
        tr.appendChild(editableCell(board, state, path, value));
      } else {
        tr.appendChild(el("td", "computed", value));
      }
    }
    table.appendChild(tr);
  }

  const predicted = el("tr");
  predicted.appendChild(el("th", undefined, "PREDICTED DEFECTS"));
  const cell = el("td", "editable");
  cell.colSpan = matrix.levels.length;
  const path = overridePathFor("predicted", "nominal");
  cell.appendChild(
    editableCell(board, state, path, String(matrix.predicted.nominal))
  );
  predicted.appendChild(cell);
  table.appendChild(predicted);
  root.appendChild(table);
}

function renderScope(board: Board, state: BoardState, root: HTMLElement): void {
  const plan = state.basePlan;
  if (!plan) return;
  const compositionOn =
    (plan.options as { composition?: { enabled?: boolean } }).composition
      ?.enabled === true;
  const scope = plan.scope_matrix;
  const table = el("table", "scope-matrix");
  const head = el("tr");
  head.appendChild(el("th", undefined, "SCOPE"));
  for (const level of scope.levels) head.appendChild(el("th", undefined, level));
  table.appendChild(head);
  for (const activity of scope.activities) {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, activity));
    for (const level of scope.levels) {
      const path = overridePathFor("scope-cell", activity, level);
      const override = state.pendingOverrides[path];
      const grade =
        override !== undefined ? String(override) : scope.grid[activity][level];
      const cell = editableCell(board, state, path, grade);
      if (!compositionOn) {
        // without the composition model, scope edits carry no number;
        // mark them so nobody reads a computation into the grid
        cell.classList.add("informational");
        cell.title = "informational: scope grades do not drive DRE in this plan";
      }
      tr.appendChild(cell);
    }
    table.appendChild(tr);
  }
  root.appendChild(table);
}

function renderDeltas(state: BoardState, root: HTMLElement): void {
  if (!state.deltas || !state.matrix) return;
  const table = el("table", "deltas");
  const head = el("tr");
  head.appendChild(el("th", undefined, "Δ vs base"));
  for (const level of state.matrix.levels) head.appendChild(el("th", undefined, level));
  table.appendChild(head);
  const rows: [string, (d: { delivered_defects: number; staff_weeks: number; calendar_weeks: number }) => number][] = [
    ["DELIVERED DEFECTS", (d) => d.delivered_defects],
    ["STAFF WEEKS", (d) => d.staff_weeks],
    ["CALENDAR WEEKS", (d) => d.calendar_weeks],
  ];
  for (const [label, pick] of rows) {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, label));
    for (const level of state.matrix.levels) {
      tr.appendChild(el("td", undefined, String(pick(state.deltas[level]))));
    }
    table.appendChild(tr);
  }
  if (state.selectionDelta !== null && state.selectedLevel !== null) {
    const note = el(
      "div",
      "selection-delta",
      `selected ${state.selectedLevel}: delivered Δ ${state.selectionDelta}`
    );
    root.appendChild(note);
  }
  root.appendChild(table);
}

function renderComparison(state: BoardState, root: HTMLElement): void {
  if (!state.comparison) return;
  const table = el("table", "comparison");
  const head = el("tr");
  head.appendChild(el("th", undefined, "SCENARIO"));
  for (const level of state.comparison.levels) head.appendChild(el("th", undefined, level));
  table.appendChild(head);
  for (const scenario of state.comparison.scenarios) {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, scenario.name));
    for (const level of state.comparison.levels) {
      tr.appendChild(
        el("td", undefined, String(scenario.delivered_defects[level]))
      );
    }
    table.appendChild(tr);
  }
  root.appendChild(table);
}

function renderFindings(state: BoardState, root: HTMLElement): void {
  const findings = state.matrix?.findings ?? [];
  if (findings.length === 0) return;
  const list = el("ul", "findings");
  for (const finding of findings) {
    list.appendChild(
      el("li", finding.severity, `${finding.location}: ${finding.message}`)
    );
  }
  root.appendChild(list);
}

function renderControls(board: Board, state: BoardState, root: HTMLElement): void {
  const bar = el("div", "controls");

  const reset = el("button", undefined, "Reset");
  reset.addEventListener("click", () => void board.reset());
  bar.appendChild(reset);

  const pinName = el("input");
  pinName.placeholder = "scenario name";
  bar.appendChild(pinName);
  const pin = el("button", undefined, "Pin");
  pin.addEventListener("click", () => {
    if (pinName.value) void board.pin(pinName.value);
  });
  bar.appendChild(pin);

  const compare = el("button", undefined, "Compare pinned");
  compare.addEventListener("click", () => void board.comparePinned());
  bar.appendChild(compare);

  for (const format of ["csv", "markdown"] as const) {
    const exportButton = el("button", undefined, `Export ${format}`);
    exportButton.addEventListener("click", () => {
      void board.exportText(format).then((text) => {
        const blob = new Blob([text], { type: "text/plain" });
        const link = el("a");
        link.href = URL.createObjectURL(blob);
        link.download = `risk-matrix.${format === "csv" ? "csv" : "md"}`;
        link.click();
        URL.revokeObjectURL(link.href);
      });
    });
    bar.appendChild(exportButton);
  }

  if (state.pinned.length > 0) {
    bar.appendChild(el("span", "pinned", `pinned: ${state.pinned.join(", ")}`));
  }
  root.appendChild(bar);
}

export function mount(root: HTMLElement): Board {
  const api = new ApiClient("");
  const board = new Board(api, (state) => {
    root.innerHTML = "";
    renderBanner(state, root);
    renderControls(board, state, root);
    renderMatrix(board, state, root);
    renderDeltas(state, root);
    renderScope(board, state, root);
    renderComparison(state, root);
    renderFindings(state, root);
  });
  void board.init();
  return board;
}

const container = document.getElementById("board");
if (container) {
  mount(container);
}
