"""HTTP service for the live per-user labeling loop.

Each user gets an isolated session: a seeded queue of corpus messages, a
response history, and a personal agent retrained from the full history
after every accepted response.  The agent's prediction for an item is
always computed from the history recorded strictly before that item's
response arrives, and it abstains during the first warmup responses.

Cross-user requests run in parallel; per-user state is serialized behind a
per-session lock.  The loaded survey and any general statistics over it
are immutable shared reads.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .config import RunConfig
from .corpus import NON_CODABLE, SurveySet, UserResponse
from .filters import UserAgent, train_user_agent
from .reports import full_analysis
from .stats import StatConfig

STATIC_DIR = Path(__file__).parent / "static"


class ResponseBody(BaseModel):
    message_id: str
    intensity: int = Field(ge=1, le=5)
    filter: bool


@dataclass
class TraceEntry:
    index: int  # 1-based position in the session
    prediction: bool | None  # None while the agent is warming up
    choice: bool
    running_agreement: float | None


@dataclass
class Session:
    user_id: str
    queue: list[str]  # message ids in seeded per-user order
    answered: set[str] = field(default_factory=set)
    history: list[UserResponse] = field(default_factory=list)
    trace: list[TraceEntry] = field(default_factory=list)
    agent: UserAgent | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def agreement_rate(self) -> float | None:
        scored = [t for t in self.trace if t.prediction is not None]
        if not scored:
            return None
        return sum(1 for t in scored if t.prediction == t.choice) / len(scored)


def create_app(
    survey: SurveySet,
    config: RunConfig = RunConfig(),
    response_log: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="feedfilter live labeling service")
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()
    log_lock = threading.Lock()
    summary_cache: dict = {}

    if response_log is not None and not response_log.exists():
        response_log.write_text("user_id,tweet_id,intensity,filter\n", encoding="utf-8")

    def get_session(user_id: str) -> Session:
        with sessions_lock:
            session = sessions.get(user_id)
            if session is None:
                order = [m.id for m in survey.messages]
                random.Random(f"{config.seed}:queue:{user_id}").shuffle(order)
                session = Session(user_id=user_id, queue=order)
                sessions[user_id] = session
            return session

    def predict_for(session: Session, message_id: str) -> bool | None:
        if len(session.history) < config.warmup or session.agent is None:
            return None
        return session.agent.predict_message(survey.message_by_id[message_id])

    @app.get("/api/session/{user_id}/next")
    def next_item(user_id: str):
        session = get_session(user_id)
        with session.lock:
            for message_id in session.queue:
                if message_id not in session.answered:
                    message = survey.message_by_id[message_id]
                    return {"message_id": message.id, "text": message.text}
        raise HTTPException(status_code=404, detail="no pending messages for this session")

    @app.post("/api/session/{user_id}/response")
    def submit_response(user_id: str, body: ResponseBody):
        session = get_session(user_id)
        with session.lock:
            message = survey.message_by_id.get(body.message_id)
            if message is None:
                raise HTTPException(
                    status_code=404, detail=f"unknown message_id: {body.message_id}"
                )
            if body.message_id in session.answered:
                raise HTTPException(
                    status_code=409,
                    detail=f"duplicate response for message_id: {body.message_id}",
                )
            # Prediction comes from the history strictly before this item.
            prediction = predict_for(session, body.message_id)
            response = UserResponse(
                user_id=user_id,
                message_id=body.message_id,
                intensity=body.intensity,
                filter=body.filter,
            )
            session.answered.add(body.message_id)
            session.history.append(response)
            session.agent = train_user_agent(
                user_id,
                session.history,
                survey.message_by_id,
                config.learner,
                config.seed,
                config.learner_params(),
                config.feature_config(),
            )
            entry = TraceEntry(
                index=len(session.history),
                prediction=prediction,
                choice=body.filter,
                running_agreement=None,
            )
            session.trace.append(entry)
            entry.running_agreement = session.agreement_rate()
            if response_log is not None:
                with log_lock:
                    with response_log.open("a", encoding="utf-8") as out:
                        out.write(
                            f"{user_id},{body.message_id},{body.intensity},{int(body.filter)}\n"
                        )
            return {
                "accepted": True,
                "agent_prediction_was": prediction,
                "running_agreement": entry.running_agreement,
            }

    @app.get("/api/session/{user_id}/agent")
    def agent_state(user_id: str):
        session = get_session(user_id)
        with session.lock:
            per_category: dict[str, list[int]] = {}
            for r in session.history:
                category = survey.message_by_id[r.message_id].resolved_category
                key = "non_codable" if category is NON_CODABLE else str(int(category))
                totals = per_category.setdefault(key, [0, 0])
                totals[0] += 1
                totals[1] += int(r.filter)
            return {
                "n_responses": len(session.history),
                "agreement_rate": session.agreement_rate(),
                "per_category_filter_rate": {
                    key: filtered / total
                    for key, (total, filtered) in sorted(per_category.items())
                },
                "warmed_up": len(session.history) >= config.warmup,
            }

    @app.get("/api/reports/summary")
    def reports_summary():
        if "doc" not in summary_cache:
            stat_config = StatConfig(alpha=config.alpha, ci_rule=config.ci_rule)
            summary_cache["doc"] = full_analysis(survey, stat_config, config.to_dict())
        return summary_cache["doc"]

    if STATIC_DIR.is_dir():
        app.mount("/", StaticFiles(directory=STATIC_DIR, html=True), name="static")

    return app
