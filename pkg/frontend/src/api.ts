// Thin typed client over the workbench API. The dashboard never mutates
// state locally: every change goes through these calls and the UI re-reads
// the documents afterwards.

import type {
  CoverageDoc,
  DiagnosesDoc,
  EventsDoc,
  HarnessDoc,
  IterationPoll,
  ReportDoc,
  ReviewDoc,
  SessionDoc,
  SessionsDoc,
  SourceDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    detail: string,
  ) {
    super(detail || errorName);
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const text = await response.text();
    if (!response.ok) {
      let name = `HTTP ${response.status}`;
      let detail = text;
      try {
        const body = JSON.parse(text);
        name = body.error ?? name;
        detail = body.detail ?? detail;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(response.status, name, detail);
    }
    return JSON.parse(text) as T;
  }

  sessions(): Promise<SessionsDoc> {
    return this.request("/sessions");
  }

  session(id: string): Promise<SessionDoc> {
    return this.request(`/sessions/${id}`);
  }

  report(id: string, revision: number): Promise<ReportDoc> {
    return this.request(`/sessions/${id}/revisions/${revision}/report`);
  }

  diagnoses(id: string): Promise<DiagnosesDoc> {
    return this.request(`/sessions/${id}/diagnoses`);
  }

  coverage(id: string): Promise<CoverageDoc> {
    return this.request(`/sessions/${id}/coverage`);
  }

  review(id: string): Promise<ReviewDoc> {
    return this.request(`/sessions/${id}/review`);
  }

  source(id: string, file: string): Promise<SourceDoc> {
    return this.request(
      `/sessions/${id}/source?file=${encodeURIComponent(file)}`,
    );
  }

  harness(
    id: string,
    candidate?: { diagnosis: number; suggestion: number },
  ): Promise<HarnessDoc> {
    let query = "";
    if (candidate) {
      query = `?diagnosis=${candidate.diagnosis}&suggestion=${candidate.suggestion}`;
    }
    return this.request(`/sessions/${id}/harness${query}`);
  }

  accept(
    id: string,
    diagnosis: number,
    suggestion: number,
    revision?: number,
  ): Promise<SessionDoc> {
    return this.request(`/sessions/${id}/accept`, {
      method: "POST",
      body: JSON.stringify({ diagnosis, suggestion, revision }),
    });
  }

  markReview(id: string, item: number, status: string): Promise<ReviewDoc> {
    return this.request(`/sessions/${id}/review`, {
      method: "POST",
      body: JSON.stringify({ item, status }),
    });
  }

  async iterate(id: string): Promise<string> {
    const doc = await this.request<{ token: string }>(
      `/sessions/${id}/iterate`,
      { method: "POST" },
    );
    return doc.token;
  }

  pollIteration(id: string, token: string): Promise<IterationPoll> {
    return this.request(`/sessions/${id}/iterations/${token}`);
  }

  async iterateToCompletion(
    id: string,
    intervalMs = 150,
    timeoutMs = 30_000,
  ): Promise<IterationPoll> {
    const token = await this.iterate(id);
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const poll = await this.pollIteration(id, token);
      if (poll.state !== "running") {
        return poll;
      }
      if (Date.now() > deadline) {
        throw new ApiError(408, "IterateTimeout", "run did not finish in time");
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }

  events(id: string, cursor: number, timeoutSeconds = 25): Promise<EventsDoc> {
    return this.request(
      `/sessions/${id}/events?cursor=${cursor}&timeout=${timeoutSeconds}`,
    );
  }
}
