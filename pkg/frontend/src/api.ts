/**
 * Typed client for the categoriser review service (/v1).
 *
 * Every call resolves to the server's JSON or throws ApiError; nothing is
 * computed locally. A failed fetch (server down) becomes ApiError with
 * status 0 so callers can show one kind of banner for everything.
 */

export interface Entry {
  code: string;
  weight: number | null; // null for manually added descriptors
  label: string;
  deleted: boolean;
  manual: boolean;
  explainable: boolean;
}

export interface DocState {
  doc_id: string;
  empty_doc: boolean;
  token_count: number;
  entries: Entry[];
}

export interface SessionState {
  session_id: string;
  k: number;
  saved?: boolean;
  documents: DocState[];
}

export interface MatchedAssociate {
  feature: string;
  profile_weight: number;
  doc_count: number;
}

export interface Explanation {
  code: string;
  doc_id: string;
  text: string;
  matched: MatchedAssociate[];
  spans: [number, number][];
}

export interface DescriptorBrief {
  code: string;
  label: string;
}

export interface DescriptorDetail {
  code: string;
  label: string;
  labels: Record<string, string>;
  field_id: string | null;
  field_label: string | null;
  broader: DescriptorBrief[];
  narrower: DescriptorBrief[];
  related: DescriptorBrief[];
  trained: boolean;
}

export interface SearchResponse {
  query: string;
  lang: string;
  total: number;
  results: DescriptorBrief[];
}

export interface SaveResponse {
  xml: string;
  path: string | null;
}

export interface HealthResponse {
  status: string;
  profiles: number;
  descriptors: number;
  feature_spec: string;
}

export type AmendAction = "add" | "delete";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export class ReviewApi {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    if (!resp.ok) {
      let detail = `${resp.status} ${resp.statusText}`;
      try {
        const body = (await resp.json()) as { detail?: unknown };
        if (typeof body.detail === "string") detail = body.detail;
      } catch {
        // body was not JSON; keep the status line
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  indexTexts(
    documents: { doc_id?: string; text: string }[],
    k?: number,
    lang?: string,
  ): Promise<SessionState> {
    return this.request<SessionState>("/v1/index", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ documents, k, lang }),
    });
  }

  indexFiles(files: File[], k?: number, lang?: string): Promise<SessionState> {
    const form = new FormData();
    for (const file of files) form.append("files", file);
    if (k !== undefined) form.append("k", String(k));
    if (lang !== undefined) form.append("lang", lang);
    return this.request<SessionState>("/v1/index", { method: "POST", body: form });
  }

  session(sessionId: string, lang?: string): Promise<SessionState> {
    return this.request<SessionState>(
      `/v1/session/${encodeURIComponent(sessionId)}${lang ? `?lang=${encodeURIComponent(lang)}` : ""}`,
    );
  }

  amend(
    sessionId: string,
    action: AmendAction,
    code: string,
    docId?: string,
  ): Promise<DocState> {
    return this.request<DocState>(
      `/v1/session/${encodeURIComponent(sessionId)}/amend`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ action, code, doc_id: docId }),
      },
    );
  }

  save(sessionId: string): Promise<SaveResponse> {
    return this.request<SaveResponse>(
      `/v1/session/${encodeURIComponent(sessionId)}/save`,
      { method: "POST" },
    );
  }

  explain(sessionId: string, code: string, docId?: string): Promise<Explanation> {
    const query = docId ? `?doc_id=${encodeURIComponent(docId)}` : "";
    return this.request<Explanation>(
      `/v1/session/${encodeURIComponent(sessionId)}/explain/${encodeURIComponent(code)}${query}`,
    );
  }

  descriptor(code: string, lang?: string): Promise<DescriptorDetail> {
    const query = lang ? `?lang=${encodeURIComponent(lang)}` : "";
    return this.request<DescriptorDetail>(
      `/v1/descriptor/${encodeURIComponent(code)}${query}`,
    );
  }

  search(q: string, lang?: string, limit?: number): Promise<SearchResponse> {
    const params = new URLSearchParams({ q });
    if (lang !== undefined) params.set("lang", lang);
    if (limit !== undefined) params.set("limit", String(limit));
    return this.request<SearchResponse>(`/v1/search?${params}`);
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/v1/health");
  }
}
