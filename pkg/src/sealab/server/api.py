"""HTTP + streaming API.

JSON bodies throughout; the stream endpoint delivers newline-delimited
JSON frames {seq,t,u,f,anim:{belt,defl}} ending with {done:true,...}.
Domain errors map to 4xx with a structured detail; engine protocol
violations carry the violated assumption's name so the client can render
it verbatim.
"""

from __future__ import annotations

import json

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from pydantic import BaseModel

from ..errors import (
    AuthError,
    NotFoundError,
    ProtocolViolationError,
    SchedulingError,
    SealabError,
)
from .core import LabServer


class LoginBody(BaseModel):
    user_id: str
    password: str


class PrelabAnswerBody(BaseModel):
    question_id: str
    answer: str | float | int | list


class ReserveBody(BaseModel):
    experiment: str
    start: str  # ISO datetime


class LabEventBody(BaseModel):
    type: str  # "answer" | "start_run" | "reset"
    variable: str | None = None
    value: float | int | list | None = None


def create_app(server: LabServer) -> FastAPI:
    app = FastAPI(title="sealab", docs_url=None, redoc_url=None)
    app.state.server = server

    def user(authorization: str | None = Header(default=None)):
        token = None
        if authorization and authorization.lower().startswith("bearer "):
            token = authorization[7:]
        try:
            return server.auth.resolve(token)
        except AuthError as exc:
            raise HTTPException(status_code=401, detail=str(exc))

    @app.exception_handler(SealabError)
    async def domain_error(request: Request, exc: SealabError):
        return JSONResponse(status_code=_status_for(exc), content={"detail": _detail_for(exc)})

    @app.post("/login")
    def login(body: LoginBody):
        try:
            token = server.auth.login(body.user_id, body.password)
        except AuthError as exc:
            raise HTTPException(status_code=401, detail=str(exc))
        session = server.auth.sessions[body.user_id]
        return {"token": token, "user_id": body.user_id, "display_name": session.display_name}

    @app.get("/experiments")
    def experiments(session=Depends(user)):
        return server.experiment_listing(session.user_id)

    @app.get("/prelab/{experiment}")
    def prelab_questions(experiment: str, session=Depends(user)):
        return server.prelab.public_questions(experiment, session.user_id)

    @app.post("/prelab/{experiment}")
    def prelab_submit(experiment: str, body: PrelabAnswerBody, session=Depends(user)):
        verdict = server.prelab.submit(session.user_id, experiment, body.question_id, body.answer)
        return {
            "correct": verdict.correct,
            "hint": verdict.hint,
            "completed": verdict.completed,
            "next_question_id": verdict.next_question_id,
        }

    @app.get("/calendar/{experiment}")
    def calendar(experiment: str, week: str | None = None, session=Depends(user)):
        doc = server.calendar(session.user_id, experiment, week)
        doc["can_reserve"] = server.prelab.completed(session.user_id, experiment)
        return doc

    @app.post("/reserve")
    def reserve(body: ReserveBody, session=Depends(user)):
        res = server.reserve(session.user_id, body.experiment, body.start)
        return res.to_dict()

    @app.delete("/reserve/{reservation_id}")
    def cancel(reservation_id: str, session=Depends(user)):
        server.scheduler.cancel(session.user_id, reservation_id)
        return {"cancelled": reservation_id}

    @app.post("/lab/{experiment}/start")
    def lab_start(experiment: str, session=Depends(user)):
        ctx = server.start_lab(session.user_id, experiment)
        return server.labs.state_mirror(ctx)

    @app.post("/lab/{experiment}/event")
    def lab_event(experiment: str, body: LabEventBody, session=Depends(user)):
        ctx = server.labs.context(session.user_id, experiment)
        if body.type == "answer":
            if body.variable is None or body.value is None:
                raise HTTPException(status_code=422, detail="answer events need variable and value")
            try:
                return server.labs.submit_answer(ctx, body.variable, body.value)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        if body.type == "start_run":
            return server.labs.start_run(ctx)
        if body.type == "reset":
            return server.labs.reset(ctx)
        raise HTTPException(status_code=422, detail=f"unknown event type '{body.type}'")

    @app.get("/lab/{experiment}/state")
    def lab_state(experiment: str, session=Depends(user)):
        ctx = server.labs.context(session.user_id, experiment)
        return server.labs.state_mirror(ctx)

    @app.get("/lab/{experiment}/stream")
    def lab_stream(experiment: str, session=Depends(user)):
        ctx = server.labs.context(session.user_id, experiment)
        hub = ctx.hub
        if hub is None:
            raise HTTPException(status_code=409, detail="no run has been started")

        def gen():
            for doc in hub.subscribe():
                yield json.dumps(doc, separators=(",", ":")) + "\n"

        return StreamingResponse(gen(), media_type="application/x-ndjson")

    @app.get("/archive/{archive_id}")
    def archive_summary(archive_id: str, session=Depends(user)):
        doc = server.archives.summary(archive_id)
        if doc["user_id"] != session.user_id:
            raise HTTPException(status_code=403, detail="archive belongs to another user")
        return doc

    @app.get("/archive/{archive_id}/record.csv")
    def archive_record(archive_id: str, session=Depends(user)):
        _authorize_archive(server, archive_id, session)
        return PlainTextResponse(server.archives.record_csv(archive_id), media_type="text/csv")

    @app.get("/archive/{archive_id}/bode.csv")
    def archive_bode(archive_id: str, session=Depends(user)):
        _authorize_archive(server, archive_id, session)
        return PlainTextResponse(server.archives.bode_csv(archive_id), media_type="text/csv")

    @app.get("/archive/{archive_id}/bode_ideal.csv")
    def archive_bode_ideal(archive_id: str, session=Depends(user)):
        _authorize_archive(server, archive_id, session)
        return PlainTextResponse(server.archives.ideal_bode_csv(archive_id), media_type="text/csv")

    _mount_frontend(app)
    return app


def _authorize_archive(server: LabServer, archive_id: str, session) -> None:
    doc = server.archives.summary(archive_id)
    if doc["user_id"] != session.user_id:
        raise HTTPException(status_code=403, detail="archive belongs to another user")


def _status_for(exc: SealabError) -> int:
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, AuthError):
        return 401
    if isinstance(exc, (SchedulingError, ProtocolViolationError)):
        return 409
    return 400


def _detail_for(exc: SealabError):
    if isinstance(exc, ProtocolViolationError):
        return {"error": str(exc), "assumption": exc.assumption}
    return str(exc)


def _mount_frontend(app: FastAPI) -> None:
    """Serve the browser console's static build when present."""
    from pathlib import Path

    dist = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    if dist.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(dist), html=True), name="ui")
