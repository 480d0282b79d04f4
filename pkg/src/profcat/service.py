"""Review HTTP service (API version 1).

Stateless with respect to the model and thesaurus (loaded once, never
mutated) and stateful only for review sessions, which live in memory:

    POST /v1/index                      rank uploaded or posted documents,
                                        open a session
    GET  /v1/session/{sid}              current session state
    POST /v1/session/{sid}/amend        add or delete one category
    POST /v1/session/{sid}/save         produce the final XML
    GET  /v1/session/{sid}/explain/{code}   matched associates + text spans
    GET  /v1/descriptor/{code}          labels, broader/narrower/related
    GET  /v1/search?q=&lang=            label substring search
    GET  /v1/health                     liveness and model shape

Unknown codes, sessions, and documents yield 404; conflicting amendments
yield 409; malformed bodies yield 400/422.  Unexpected failures are reported
as a bare 500 without internal detail.
"""

from __future__ import annotations

import logging
import threading
import uuid
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .indexer import Blacklist, EMPTY_BLACKLIST, explain, rank, vectorize
from .textprep import ExtractionError, StopLists, extract_text
from .thesaurus import Descriptor, Thesaurus
from .trainer import Model
from .xmlout import DocResult, result_xml

logger = logging.getLogger(__name__)

__all__ = ["ServiceState", "SessionDoc", "create_app"]


@dataclass
class SessionDoc:
    """One document under review: the automatic assignment plus the
    reviewer's amendments so far."""

    doc_id: str
    text: str  # extracted text, used for explanation spans
    features: dict[str, int]
    token_count: int
    entries: tuple[tuple[str, float], ...]  # automatic, rank order
    empty_doc: bool
    added: list[str] = dc_field(default_factory=list)  # manual codes, oldest first
    deleted: set[str] = dc_field(default_factory=set)


@dataclass
class Session:
    session_id: str
    docs: dict[str, SessionDoc]
    k: int
    lang: str
    saved: bool = False
    lock: threading.Lock = dc_field(default_factory=threading.Lock)


@dataclass
class ServiceState:
    """Everything the endpoints need.  Model, thesaurus, stop lists, and
    blacklist are read-only after startup."""

    model: Model
    thesaurus: Thesaurus
    stops: StopLists
    blacklist: Blacklist = EMPTY_BLACKLIST
    default_k: int = 6
    default_lang: str = "en"
    out_dir: Path | None = None
    sessions: dict[str, Session] = dc_field(default_factory=dict)
    sessions_lock: threading.Lock = dc_field(default_factory=threading.Lock)


class DocumentIn(BaseModel):
    doc_id: str | None = None
    text: str


class IndexRequest(BaseModel):
    documents: list[DocumentIn] = Field(min_length=1)
    k: int | None = None
    lang: str | None = None


class AmendRequest(BaseModel):
    action: Literal["add", "delete"]
    code: str
    doc_id: str | None = None


def _descriptor_brief(d: Descriptor, lang: str) -> dict:
    return {"code": d.code, "label": d.label(lang)}


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="profcat review service", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(Exception)
    async def internal_error(_request: Request, exc: Exception) -> JSONResponse:
        logger.exception("unhandled service error: %s", exc)
        return JSONResponse(status_code=500, content={"detail": "internal error"})

    def get_session(sid: str) -> Session:
        session = state.sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session: {sid}")
        return session

    def get_doc(session: Session, doc_id: str | None) -> SessionDoc:
        if doc_id is None:
            if len(session.docs) == 1:
                return next(iter(session.docs.values()))
            raise HTTPException(
                status_code=400,
                detail="session has multiple documents; doc_id is required",
            )
        doc = session.docs.get(doc_id)
        if doc is None:
            raise HTTPException(status_code=404, detail=f"unknown document: {doc_id}")
        return doc

    def doc_state(doc: SessionDoc, lang: str) -> dict:
        entries = []
        for code, weight in doc.entries:
            entries.append(
                {
                    "code": code,
                    "weight": weight,
                    "label": _label(code, lang),
                    "deleted": code in doc.deleted,
                    "manual": False,
                    "explainable": True,
                }
            )
        for code in doc.added:
            entries.append(
                {
                    "code": code,
                    "weight": None,
                    "label": _label(code, lang),
                    "deleted": False,
                    "manual": True,
                    "explainable": code in state.model.profiles,
                }
            )
        return {
            "doc_id": doc.doc_id,
            "empty_doc": doc.empty_doc,
            "token_count": doc.token_count,
            "entries": entries,
        }

    def _label(code: str, lang: str) -> str:
        if code in state.thesaurus:
            return state.thesaurus.get(code).label(lang)
        return code

    def _index_texts(items: list[tuple[str, str]], k: int, lang: str) -> dict:
        docs: dict[str, SessionDoc] = {}
        for doc_id, raw in items:
            if doc_id in docs:
                raise HTTPException(status_code=400, detail=f"duplicate doc_id: {doc_id}")
            try:
                text = extract_text(raw)
            except ExtractionError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            fd = vectorize(raw, state.model.feature_spec, state.stops, doc_id=doc_id)
            assignment = rank(fd, state.model, state.blacklist, k)
            docs[doc_id] = SessionDoc(
                doc_id=doc_id,
                text=text,
                features=fd.features,
                token_count=fd.token_count,
                entries=assignment.entries,
                empty_doc=assignment.empty_doc,
            )
        session = Session(
            session_id=uuid.uuid4().hex, docs=docs, k=k, lang=lang
        )
        with state.sessions_lock:
            state.sessions[session.session_id] = session
        return {
            "session_id": session.session_id,
            "k": k,
            "documents": [doc_state(d, lang) for d in docs.values()],
        }

    @app.post("/v1/index")
    async def index_documents(request: Request) -> dict:
        content_type = request.headers.get("content-type", "")
        if "multipart/form-data" in content_type:
            form = await request.form()
            k = int(form.get("k") or state.default_k)
            lang = str(form.get("lang") or state.default_lang)
            items: list[tuple[str, str]] = []
            uploads = [v for key, v in form.multi_items() if key == "files"]
            if not uploads:
                raise HTTPException(status_code=400, detail="no files uploaded")
            for i, upload in enumerate(uploads):
                raw = await upload.read()
                try:
                    text = raw.decode("utf-8-sig")
                except UnicodeDecodeError:
                    raise HTTPException(
                        status_code=400,
                        detail=f"file {upload.filename!r} is not valid UTF-8",
                    ) from None
                items.append((upload.filename or f"upload-{i + 1}", text))
        else:
            try:
                payload = IndexRequest.model_validate(await request.json())
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            k = state.default_k if payload.k is None else payload.k
            lang = payload.lang or state.default_lang
            items = [
                (d.doc_id or f"doc-{i + 1}", d.text)
                for i, d in enumerate(payload.documents)
            ]
        if k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        return _index_texts(items, k, lang)

    @app.get("/v1/session/{sid}")
    def session_state(sid: str, lang: str | None = None) -> dict:
        session = get_session(sid)
        lang = lang or session.lang
        return {
            "session_id": session.session_id,
            "k": session.k,
            "saved": session.saved,
            "documents": [doc_state(d, lang) for d in session.docs.values()],
        }

    @app.post("/v1/session/{sid}/amend")
    def amend(sid: str, body: AmendRequest) -> dict:
        session = get_session(sid)
        with session.lock:
            doc = get_doc(session, body.doc_id)
            code = body.code
            automatic = {c for c, _ in doc.entries}
            if body.action == "delete":
                if code in doc.added:
                    doc.added.remove(code)
                elif code in automatic and code not in doc.deleted:
                    doc.deleted.add(code)
                else:
                    raise HTTPException(
                        status_code=404,
                        detail=f"code {code!r} is not assigned to document {doc.doc_id!r}",
                    )
            else:  # add
                if code not in state.thesaurus and code not in state.model.profiles:
                    raise HTTPException(status_code=404, detail=f"unknown code: {code}")
                if code in doc.added or (code in automatic and code not in doc.deleted):
                    raise HTTPException(
                        status_code=409, detail=f"code {code!r} is already assigned"
                    )
                if code in doc.deleted:
                    doc.deleted.discard(code)  # restore the automatic entry
                else:
                    doc.added.append(code)
            session.saved = False
            return doc_state(doc, session.lang)

    @app.post("/v1/session/{sid}/save")
    def save(sid: str) -> dict:
        session = get_session(sid)
        with session.lock:
            results = [
                DocResult(
                    doc_id=d.doc_id,
                    entries=tuple(
                        (c, w) for c, w in d.entries if c not in d.deleted
                    ),
                    manual=tuple(d.added),
                )
                for d in session.docs.values()
            ]
            xml = result_xml(results)
            path = None
            if state.out_dir is not None:
                state.out_dir.mkdir(parents=True, exist_ok=True)
                path = state.out_dir / f"{session.session_id}.xml"
                path.write_text(xml + "\n", encoding="utf-8")
            session.saved = True
            return {"xml": xml, "path": str(path) if path else None}

    @app.get("/v1/session/{sid}/explain/{code}")
    def explain_code(sid: str, code: str, doc_id: str | None = None) -> dict:
        session = get_session(sid)
        doc = get_doc(session, doc_id)
        if code not in state.model.profiles:
            raise HTTPException(status_code=404, detail=f"no profile for code: {code}")
        from .textprep import FeatureDoc

        fd = FeatureDoc(doc.doc_id, doc.features, doc.token_count)
        expl = explain(fd, doc.text, state.model, code, state.stops)
        return {
            "code": code,
            "doc_id": doc.doc_id,
            "text": doc.text,
            "matched": [
                {
                    "feature": m.feature,
                    "profile_weight": m.profile_weight,
                    "doc_count": m.doc_count,
                }
                for m in expl.matched
            ],
            "spans": [[s, e] for s, e in expl.spans],
        }

    @app.get("/v1/descriptor/{code}")
    def descriptor(code: str, lang: str | None = None) -> dict:
        lang = lang or state.default_lang
        try:
            nb = state.thesaurus.neighborhood(code)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown code: {code}") from None
        d = nb.descriptor
        return {
            "code": d.code,
            "label": d.label(lang),
            "labels": dict(d.labels),
            "field_id": d.field_id,
            "field_label": nb.field_label,
            "broader": [_descriptor_brief(x, lang) for x in nb.broader],
            "narrower": [_descriptor_brief(x, lang) for x in nb.narrower],
            "related": [_descriptor_brief(x, lang) for x in nb.related],
            "trained": d.code in state.model.profiles,
        }

    @app.get("/v1/search")
    def search(q: str = "", lang: str | None = None, limit: int = 20) -> dict:
        if limit < 1:
            raise HTTPException(status_code=400, detail="limit must be >= 1")
        lang = lang or state.default_lang
        hits = state.thesaurus.search(q, lang)
        return {
            "query": q,
            "lang": lang,
            "total": len(hits),
            "results": [_descriptor_brief(d, lang) for d in hits[:limit]],
        }

    @app.get("/v1/health")
    def health() -> dict:
        return {
            "status": "ok",
            "profiles": len(state.model.profiles),
            "descriptors": len(state.thesaurus),
            "feature_spec": state.model.feature_spec.canonical(),
        }

    return app
