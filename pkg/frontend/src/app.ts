/**
 * Review UI wiring. Module-scope state, render functions, DOM events —
 * no framework. All data comes from the /v1 service via ReviewApi; the
 * page never ranks, scores, or edits assignments locally.
 */

import { ApiError, DescriptorBrief, ReviewApi } from "./api.js";
import { segmentText } from "./highlight.js";
import { Inspection, ReviewSession } from "./session.js";

const api = new ReviewApi();

let session: ReviewSession | null = null;
let selectedCode: string | null = null;
let inspection: Inspection | null = null;
let searchResults: DescriptorBrief[] = [];

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const errorBanner = byId<HTMLDivElement>("error-banner");
const textInput = byId<HTMLTextAreaElement>("text-input");
const fileInput = byId<HTMLInputElement>("file-input");
const kInput = byId<HTMLInputElement>("k-input");
const sessionPanel = byId<HTMLElement>("session-panel");
const docList = byId<HTMLUListElement>("doc-list");
const statusLine = byId<HTMLParagraphElement>("status-line");
const entriesBody = byId<HTMLTableSectionElement>("entries-body");
const searchInput = byId<HTMLInputElement>("search-input");
const searchResultsList = byId<HTMLUListElement>("search-results");
const descriptorPanel = byId<HTMLElement>("descriptor-panel");
const textPanel = byId<HTMLElement>("text-panel");
const xmlOutput = byId<HTMLPreElement>("xml-output");

function showError(err: unknown): void {
  const message =
    err instanceof ApiError ? `${err.status || "network"}: ${err.message}` : String(err);
  errorBanner.textContent = message;
  errorBanner.hidden = false;
}

function clearError(): void {
  errorBanner.hidden = true;
  errorBanner.textContent = "";
}

/** Run an async handler, routing any failure to the banner. */
function guard(fn: () => Promise<void>): () => void {
  return () => {
    clearError();
    fn().catch(showError);
  };
}

function parseK(): number | undefined {
  const raw = kInput.value.trim();
  if (!raw) return undefined;
  const k = Number(raw);
  return Number.isInteger(k) && k > 0 ? k : undefined;
}

function render(): void {
  sessionPanel.hidden = session === null;
  if (!session) return;
  renderDocList();
  renderStatus();
  renderEntries();
  renderSearchResults();
  renderDescriptor();
  renderText();
}

function renderDocList(): void {
  if (!session) return;
  docList.replaceChildren();
  docList.hidden = session.docs.length < 2;
  for (const doc of session.docs) {
    const li = document.createElement("li");
    const button = document.createElement("button");
    button.textContent = doc.state.doc_id;
    if (doc === session.selected) button.classList.add("active");
    button.addEventListener(
      "click",
      guard(async () => {
        session!.selectDoc(doc.state.doc_id);
        selectedCode = null;
        inspection = null;
        render();
      }),
    );
    li.appendChild(button);
    docList.appendChild(li);
  }
}

function renderStatus(): void {
  if (!session) return;
  const doc = session.selected.state;
  const parts = [
    `session ${session.sessionId}`,
    `k=${session.k}`,
    `${doc.token_count} tokens`,
    session.saved ? "saved" : "unsaved",
  ];
  if (doc.empty_doc) parts.push("no usable features");
  statusLine.textContent = parts.join(" · ");
}

function renderEntries(): void {
  if (!session) return;
  entriesBody.replaceChildren();
  for (const entry of session.selected.state.entries) {
    const row = document.createElement("tr");
    if (entry.deleted) row.classList.add("deleted");

    const codeCell = document.createElement("td");
    const codeButton = document.createElement("button");
    codeButton.textContent = entry.code;
    codeButton.classList.add("code");
    codeButton.addEventListener("click", guard(() => inspectCode(entry.code)));
    codeCell.appendChild(codeButton);

    const labelCell = document.createElement("td");
    labelCell.textContent = entry.label + (entry.manual ? " (manual)" : "");

    const weightCell = document.createElement("td");
    weightCell.textContent = entry.weight === null ? "—" : entry.weight.toFixed(4);

    const actionCell = document.createElement("td");
    const actionButton = document.createElement("button");
    actionButton.textContent = entry.deleted ? "restore" : "delete";
    actionButton.addEventListener(
      "click",
      guard(async () => {
        if (entry.deleted) await session!.addCode(entry.code);
        else await session!.deleteCode(entry.code);
        if (selectedCode === entry.code && entry.deleted === false) {
          // deleting the inspected descriptor closes its panel
          selectedCode = null;
          inspection = null;
        }
        render();
      }),
    );
    actionCell.appendChild(actionButton);

    row.append(codeCell, labelCell, weightCell, actionCell);
    entriesBody.appendChild(row);
  }
}

async function inspectCode(code: string): Promise<void> {
  if (!session) return;
  inspection = await session.inspect(code);
  selectedCode = code;
  render();
}

function renderSearchResults(): void {
  searchResultsList.replaceChildren();
  for (const hit of searchResults) {
    const li = document.createElement("li");
    const button = document.createElement("button");
    button.textContent = `${hit.code} ${hit.label}`;
    button.addEventListener(
      "click",
      guard(async () => {
        await session!.addCode(hit.code);
        searchResults = [];
        searchInput.value = "";
        render();
      }),
    );
    li.appendChild(button);
    searchResultsList.appendChild(li);
  }
}

function appendRelationList(
  container: HTMLElement,
  heading: string,
  items: DescriptorBrief[],
): void {
  if (items.length === 0) return; // empty relation sections stay hidden
  const h = document.createElement("h4");
  h.textContent = heading;
  const ul = document.createElement("ul");
  for (const item of items) {
    const li = document.createElement("li");
    const button = document.createElement("button");
    button.textContent = `${item.code} ${item.label}`;
    button.addEventListener("click", guard(() => inspectCode(item.code)));
    li.appendChild(button);
    ul.appendChild(li);
  }
  container.append(h, ul);
}

function renderDescriptor(): void {
  descriptorPanel.replaceChildren();
  descriptorPanel.hidden = inspection === null;
  if (!inspection) return;
  const { detail, explanation } = inspection;

  const title = document.createElement("h3");
  title.textContent = `${detail.code} — ${detail.label}`;
  descriptorPanel.appendChild(title);

  if (detail.field_label) {
    const field = document.createElement("p");
    field.textContent = `field: ${detail.field_id} ${detail.field_label}`;
    descriptorPanel.appendChild(field);
  }
  if (!detail.trained) {
    const note = document.createElement("p");
    note.textContent = "no trained profile for this descriptor";
    descriptorPanel.appendChild(note);
  }

  appendRelationList(descriptorPanel, "Broader", detail.broader);
  appendRelationList(descriptorPanel, "Narrower", detail.narrower);
  appendRelationList(descriptorPanel, "Related", detail.related);

  if (explanation && explanation.matched.length > 0) {
    const h = document.createElement("h4");
    h.textContent = "Matched associates";
    const ul = document.createElement("ul");
    for (const m of explanation.matched) {
      const li = document.createElement("li");
      li.textContent = `${m.feature} — weight ${m.profile_weight.toFixed(2)}, ×${m.doc_count}`;
      ul.appendChild(li);
    }
    descriptorPanel.append(h, ul);
  }
}

function renderText(): void {
  textPanel.replaceChildren();
  if (!session) return;
  const text = session.selected.text;
  if (text === null) {
    textPanel.textContent = "(document text not available)";
    return;
  }
  const spans =
    inspection?.explanation && inspection.explanation.text === text
      ? inspection.explanation.spans
      : [];
  for (const segment of segmentText(text, spans)) {
    if (segment.marked) {
      const mark = document.createElement("mark");
      mark.textContent = segment.text;
      textPanel.appendChild(mark);
    } else {
      textPanel.appendChild(document.createTextNode(segment.text));
    }
  }
}

async function startFromText(): Promise<void> {
  const text = textInput.value;
  if (!text.trim()) throw new ApiError(0, "paste some text first");
  session = await ReviewSession.fromTexts(api, [{ text }], parseK());
  selectedCode = null;
  inspection = null;
  xmlOutput.textContent = "";
  render();
}

async function startFromFiles(): Promise<void> {
  const files = Array.from(fileInput.files ?? []);
  if (files.length === 0) throw new ApiError(0, "choose at least one file");
  session = await ReviewSession.fromFiles(api, files, parseK());
  selectedCode = null;
  inspection = null;
  xmlOutput.textContent = "";
  render();
}

async function runSearch(): Promise<void> {
  const q = searchInput.value.trim();
  if (!q) {
    searchResults = [];
    render();
    return;
  }
  const resp = await api.search(q, undefined, 10);
  searchResults = resp.results;
  render();
}

async function saveSession(): Promise<void> {
  if (!session) return;
  const result = await session.save();
  xmlOutput.textContent = result.xml + (result.path ? `\n\nwritten to ${result.path}` : "");
  render();
}

byId<HTMLButtonElement>("submit-text-btn").addEventListener("click", guard(startFromText));
byId<HTMLButtonElement>("submit-files-btn").addEventListener("click", guard(startFromFiles));
byId<HTMLButtonElement>("search-btn").addEventListener("click", guard(runSearch));
searchInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") guard(runSearch)();
});
byId<HTMLButtonElement>("save-btn").addEventListener("click", guard(saveSession));

api
  .health()
  .then((h) => {
    statusLine.textContent = `service up — ${h.profiles} profiles, ${h.descriptors} descriptors`;
  })
  .catch(showError);
