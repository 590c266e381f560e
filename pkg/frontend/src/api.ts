import type {
  GuidanceReport,
  MentorAssignment,
  ModelDraft,
  RatingSheetPayload,
  RoundInfo,
  SchemaCatalog,
  Taxonomy,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`HTTP ${status}`);
  }
}

export class Client {
  constructor(
    private base: string,
    private token: string,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body === undefined ? {} : { "Content-Type": "application/json" }),
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const data = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, data?.detail ?? data);
    }
    return data as T;
  }

  taxonomy(): Promise<Taxonomy> {
    return this.request("GET", "/taxonomy");
  }

  schemas(): Promise<SchemaCatalog> {
    return this.request("GET", "/schemas");
  }

  createVenture(ventureId: string, tags: string[], model: ModelDraft) {
    return this.request<{ venture_id: string; version: number }>("POST", "/ventures", {
      venture_id: ventureId,
      tags,
      model,
    });
  }

  putModel(ventureId: string, model: ModelDraft) {
    return this.request<{ venture_id: string; version: number }>(
      "PUT",
      `/ventures/${encodeURIComponent(ventureId)}/model`,
      model,
    );
  }

  openRound(ventureId: string, m?: number, schema?: string) {
    return this.request<RoundInfo>(
      "POST",
      `/ventures/${encodeURIComponent(ventureId)}/rounds`,
      { m, schema },
    );
  }

  closeRound(roundId: string) {
    return this.request("POST", `/rounds/${encodeURIComponent(roundId)}/close`);
  }

  guidance(ventureId: string): Promise<GuidanceReport> {
    return this.request("GET", `/ventures/${encodeURIComponent(ventureId)}/guidance`);
  }

  myAssignments(): Promise<MentorAssignment[]> {
    return this.request("GET", "/mentors/me/assignments");
  }

  postRating(assignmentId: string, sheet: RatingSheetPayload) {
    return this.request(
      "POST",
      `/assignments/${encodeURIComponent(assignmentId)}/rating`,
      sheet,
    );
  }
}
