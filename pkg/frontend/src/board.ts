import { ApiClient, ApiError } from "./api";
import type {
  ComparisonView,
  MatrixView,
  PlanDocument,
  ScenarioResult,
} from "./types";

export const WORKING_SCENARIO = "working";

export interface BoardState {
  sessionId: string | null;
  basePlan: PlanDocument | null;
  /** Last matrix returned by the service; never computed locally. */
  matrix: MatrixView | null;
  deltas: ScenarioResult["deltas"] | null;
  selectedLevel: string | null;
  selectionDelta: number | null;
  pendingOverrides: Record<string, unknown>;
  pinned: string[];
  comparison: ComparisonView | null;
  /** Override path -> inline error message from the service. */
  cellErrors: Record<string, string>;
  /** Non-blocking banner for network failures / expired sessions. */
  banner: string | null;
}

function emptyState(): BoardState {
  return {
    sessionId: null,
    basePlan: null,
    matrix: null,
    deltas: null,
    selectedLevel: null,
    selectionDelta: null,
    pendingOverrides: {},
    pinned: [],
    comparison: null,
    cellErrors: {},
    banner: null,
  };
}

/** Translate a grid edit into the override-path grammar shared with the CLI. */
export function overridePathFor(
  kind: "level-field" | "scope-cell" | "predicted" | "selected-level",
  a?: string,
  b?: string
): string {
  switch (kind) {
    case "level-field":
      return `levels.${a}.${b}`;
    case "scope-cell":
      return `scope.${a}.${b}`;
    case "predicted":
      return `predicted.${a}`;
    case "selected-level":
      return "selected_level";
  }
}

/**
 * Negotiation-board state machine.  Every displayed number round-trips
 * through the service; overlapping edits resolve last-response-wins via a
 * request sequence number.
 */
export class Board {
  readonly state: BoardState = emptyState();
  private sequence = 0;
  private lastApplied = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: BoardState) => void = () => {}
  ) {}

  private notify(): void {
    this.onChange(this.state);
  }

  async init(plan?: PlanDocument): Promise<void> {
    try {
      const base = plan ?? (await this.api.defaults());
      this.state.basePlan = base;
      this.state.sessionId = await this.api.createSession(base);
      await this.recompute();
      this.state.banner = null;
    } catch (error) {
      this.state.banner = describeFailure(error);
    }
    this.notify();
  }

  /** Re-post the working scenario with the current pending overrides. */
  private async recompute(): Promise<ScenarioResult | null> {
    if (this.state.sessionId === null) return null;
    const requestId = ++this.sequence;
    const result = await this.api.postScenario(
      this.state.sessionId,
      WORKING_SCENARIO,
      this.state.pendingOverrides
    );
    if (requestId < this.lastApplied) return null; // stale response
    this.lastApplied = requestId;
    this.state.matrix = result.matrix;
    this.state.deltas = result.deltas;
    this.state.selectedLevel = result.selected_level;
    this.state.selectionDelta = result.selection_delta;
    return result;
  }

  /** Apply one cell edit; on a validation error the message is attached
   * to the cell and the previous display is preserved. */
  async edit(path: string, value: unknown): Promise<void> {
    const previous = this.state.pendingOverrides[path];
    const hadPrevious = path in this.state.pendingOverrides;
    this.state.pendingOverrides[path] = value;
    try {
      await this.recompute();
      delete this.state.cellErrors[path];
      this.state.banner = null;
    } catch (error) {
      if (hadPrevious) {
        this.state.pendingOverrides[path] = previous;
      } else {
        delete this.state.pendingOverrides[path];
      }
      if (error instanceof ApiError) {
        if (error.status === 404) {
          this.state.banner = "session expired, re-upload plan";
        } else {
          this.state.cellErrors[path] = error.body.message;
        }
      } else {
        this.state.banner = describeFailure(error);
      }
    }
    this.notify();
  }

  /** Drop all overrides and return to the base plan's matrix. */
  async reset(): Promise<void> {
    this.state.pendingOverrides = {};
    this.state.cellErrors = {};
    try {
      await this.recompute();
      this.state.banner = null;
    } catch (error) {
      this.state.banner = describeFailure(error);
    }
    this.notify();
  }

  /** Name the current override set as a scenario and keep it for compare. */
  async pin(name: string): Promise<void> {
    if (this.state.sessionId === null) return;
    try {
      await this.api.postScenario(
        this.state.sessionId,
        name,
        this.state.pendingOverrides
      );
      if (!this.state.pinned.includes(name)) {
        this.state.pinned.push(name);
      }
      this.state.banner = null;
    } catch (error) {
      this.state.banner = describeFailure(error);
    }
    this.notify();
  }

  async comparePinned(names?: string[]): Promise<void> {
    if (this.state.sessionId === null) return;
    const requested = names ?? this.state.pinned;
    if (requested.length === 0) return;
    try {
      this.state.comparison = await this.api.compare(
        this.state.sessionId,
        requested
      );
      this.state.banner = null;
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        if (error.body.error === "unknown-session") {
          this.state.banner = "session expired, re-upload plan";
        } else {
          // a pinned scenario no longer exists server-side; start over
          this.state.pinned = [];
          this.state.comparison = null;
          this.state.banner = error.body.message;
        }
      } else {
        this.state.banner = describeFailure(error);
      }
    }
    this.notify();
  }

  /** Export the base plan through the service renderer, unmodified. */
  async exportText(format: "markdown" | "csv"): Promise<string> {
    if (this.state.basePlan === null) {
      throw new Error("board not initialised");
    }
    return this.api.render(this.state.basePlan, format);
  }
}

function describeFailure(error: unknown): string {
  if (error instanceof ApiError) return error.body.message;
  if (error instanceof Error) return `network failure: ${error.message}`;
  return "network failure";
}
