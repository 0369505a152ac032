// View state for one open session. All truth lives on the server; the
// store only caches the latest documents and tracks what is in flight.
// Accepting is never optimistic: the server confirms, then we re-read.

import { ApiClient, ApiError } from "./api.js";
import type {
  CoverageDoc,
  DiagnosesDoc,
  ReportDoc,
  ReviewDoc,
  SessionDoc,
  SessionSummary,
  SourceDoc,
} from "./types.js";

export interface Toast {
  kind: "info" | "error" | "conflict";
  message: string;
}

export interface SessionView {
  session: SessionDoc | null;
  coverage: CoverageDoc | null;
  diagnoses: DiagnosesDoc | null;
  review: ReviewDoc | null;
  report: ReportDoc | null;
  sources: Map<string, SourceDoc>;
  runInFlight: boolean;
  toasts: Toast[];
}

type Listener = () => void;

export class Dashboard {
  sessions: SessionSummary[] = [];
  view: SessionView = emptyView();
  currentId: string | null = null;

  private listeners: Listener[] = [];
  private eventsCursor = 0;
  private eventsActive = false;

  constructor(public api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  toast(kind: Toast["kind"], message: string): void {
    this.view.toasts.push({ kind, message });
    this.notify();
  }

  dismissToasts(): void {
    this.view.toasts = [];
    this.notify();
  }

  async loadSessions(): Promise<void> {
    this.sessions = (await this.api.sessions()).sessions;
    this.notify();
  }

  async openSession(id: string): Promise<void> {
    this.currentId = id;
    this.view = emptyView();
    this.notify();
    await this.refresh();
  }

  async refresh(): Promise<void> {
    const id = this.currentId;
    if (!id) return;
    const [session, coverage, diagnoses, review] = await Promise.all([
      this.api.session(id),
      this.api.coverage(id),
      this.api.diagnoses(id),
      this.api.review(id),
    ]);
    this.view.session = session;
    this.view.coverage = coverage;
    this.view.diagnoses = diagnoses;
    this.view.review = review;
    this.view.report =
      diagnoses.revision >= 0
        ? await this.api.report(id, diagnoses.revision)
        : null;
    await this.loadSources();
    this.notify();
  }

  private async loadSources(): Promise<void> {
    const id = this.currentId;
    const coverage = this.view.coverage;
    if (!id || !coverage) return;
    const files = [...new Set(coverage.lines.map((line) => line.file))];
    for (const file of files) {
      if (this.view.sources.has(file)) continue;
      try {
        this.view.sources.set(file, await this.api.source(id, file));
      } catch {
        // source not readable: the heat map falls back to line numbers
      }
    }
  }

  /** Accept one suggestion. Returns true when the server recorded it;
   * a 409 means someone else advanced the session first, so we surface
   * the conflict and re-read. Never called while a run is in flight. */
  async accept(diagnosis: number, suggestion: number): Promise<boolean> {
    const id = this.currentId;
    if (!id || this.view.runInFlight) return false;
    const revision = this.view.diagnoses?.revision;
    try {
      await this.api.accept(id, diagnosis, suggestion, revision);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.toast("conflict", "Session changed under you; refreshing.");
        await this.refresh();
        return false;
      }
      if (error instanceof ApiError && error.status === 422) {
        this.toast("error", `Suggestion not applicable: ${error.message}`);
        return false;
      }
      throw error;
    }
    await this.refresh();
    return true;
  }

  /** The card button: accept, then rerun, then re-read everything. */
  async acceptAndIterate(diagnosis: number, suggestion: number): Promise<void> {
    const accepted = await this.accept(diagnosis, suggestion);
    if (accepted) {
      await this.iterate();
    }
  }

  async iterate(): Promise<void> {
    const id = this.currentId;
    if (!id || this.view.runInFlight) return;
    this.view.runInFlight = true;
    this.notify();
    try {
      const outcome = await this.api.iterateToCompletion(id);
      if (outcome.state === "error") {
        this.toast("error", `Run failed: ${outcome.error}`);
      }
    } catch (error) {
      if (error instanceof ApiError) {
        this.toast("error", `Run failed: ${error.errorName}`);
      } else {
        throw error;
      }
    } finally {
      this.view.runInFlight = false;
    }
    await this.refresh();
  }

  async markReview(item: number, status: string): Promise<void> {
    const id = this.currentId;
    if (!id) return;
    this.view.review = await this.api.markReview(id, item, status);
    this.notify();
  }

  /** Long-poll loop; any server-side state change triggers a re-read. */
  async watchEvents(): Promise<void> {
    const id = this.currentId;
    if (!id || this.eventsActive) return;
    this.eventsActive = true;
    this.eventsCursor = 0;
    while (this.eventsActive && this.currentId === id) {
      try {
        const doc = await this.api.events(id, this.eventsCursor, 20);
        if (this.currentId !== id) break;
        if (doc.events.length > 0) {
          this.eventsCursor = doc.cursor;
          if (!this.view.runInFlight) {
            await this.refresh();
          }
        }
      } catch {
        await new Promise((resolve) => setTimeout(resolve, 1000));
      }
    }
  }

  stopEvents(): void {
    this.eventsActive = false;
  }
}

export function emptyView(): SessionView {
  return {
    session: null,
    coverage: null,
    diagnoses: null,
    review: null,
    report: null,
    sources: new Map(),
    runInFlight: false,
    toasts: [],
  };
}
