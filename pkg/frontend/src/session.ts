/**
 * Client-side review session.
 *
 * The server owns all assignment state; this class only caches the latest
 * responses and the submitted text (the service never echoes document text
 * back outside of explanations). Every amend replaces the affected doc's
 * state wholesale with what the server returned — the UI never edits entry
 * lists locally.
 */

import {
  DescriptorDetail,
  DocState,
  Explanation,
  ReviewApi,
  SaveResponse,
  SessionState,
} from "./api.js";

export interface ReviewDoc {
  state: DocState;
  /** Text as submitted, when known; file uploads start unknown. */
  text: string | null;
}

export interface Inspection {
  detail: DescriptorDetail;
  explanation: Explanation | null;
}

export class ReviewSession {
  readonly sessionId: string;
  readonly k: number;
  docs: ReviewDoc[];
  saved = false;
  private selectedIdx = 0;

  private constructor(
    private readonly api: ReviewApi,
    state: SessionState,
    texts: Map<string, string>,
  ) {
    this.sessionId = state.session_id;
    this.k = state.k;
    this.docs = state.documents.map((d) => ({
      state: d,
      text: texts.get(d.doc_id) ?? null,
    }));
  }

  static async fromTexts(
    api: ReviewApi,
    documents: { doc_id?: string; text: string }[],
    k?: number,
    lang?: string,
  ): Promise<ReviewSession> {
    const state = await api.indexTexts(documents, k, lang);
    const texts = new Map<string, string>();
    state.documents.forEach((d, i) => {
      const sent = documents[i];
      if (sent) texts.set(d.doc_id, sent.text);
    });
    return new ReviewSession(api, state, texts);
  }

  static async fromFiles(
    api: ReviewApi,
    files: File[],
    k?: number,
  ): Promise<ReviewSession> {
    const state = await api.indexFiles(files, k);
    return new ReviewSession(api, state, new Map());
  }

  get selected(): ReviewDoc {
    const doc = this.docs[this.selectedIdx];
    if (!doc) throw new Error("session has no documents");
    return doc;
  }

  selectDoc(docId: string): void {
    const idx = this.docs.findIndex((d) => d.state.doc_id === docId);
    if (idx < 0) throw new Error(`unknown document: ${docId}`);
    this.selectedIdx = idx;
  }

  /** Descriptor neighbourhood plus, when the model can justify it, the
   * matched-associate evidence for the selected document. */
  async inspect(code: string, lang?: string): Promise<Inspection> {
    const detail = await this.api.descriptor(code, lang);
    const entry = this.selected.state.entries.find((e) => e.code === code);
    let explanation: Explanation | null = null;
    if (entry && entry.explainable && !this.selected.state.empty_doc) {
      explanation = await this.api.explain(
        this.sessionId,
        code,
        this.selected.state.doc_id,
      );
      if (this.selected.text === null) {
        // adopt the server's extracted text so spans have something to mark
        this.selected.text = explanation.text;
      }
    }
    return { detail, explanation };
  }

  async deleteCode(code: string): Promise<DocState> {
    return this.applyAmend("delete", code);
  }

  async addCode(code: string): Promise<DocState> {
    return this.applyAmend("add", code);
  }

  private async applyAmend(action: "add" | "delete", code: string): Promise<DocState> {
    const docId = this.docs.length > 1 ? this.selected.state.doc_id : undefined;
    const state = await this.api.amend(this.sessionId, action, code, docId);
    const doc = this.docs.find((d) => d.state.doc_id === state.doc_id);
    if (doc) doc.state = state;
    this.saved = false;
    return state;
  }

  async save(): Promise<SaveResponse> {
    const result = await this.api.save(this.sessionId);
    this.saved = true;
    return result;
  }
}
