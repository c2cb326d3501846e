"""Graph-grounded chat sessions.

A session carries the serialized graph spliced into its system prompt
plus the running conversation history. Prompt assembly enforces a token
budget by dropping the oldest user/assistant pair first; the system
message is never dropped.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

from .graph import PropertyGraph
from .graphio import estimate_tokens, export_graphml
from .providers import Provider

DEFAULT_SYSTEM_TEMPLATE = (
    "You are a process engineering assistant. The following P&ID is provided "
    "as a GraphML knowledge graph. Answer using only this graph and sound "
    "engineering judgment; cite node tag names when possible.\n"
    "<GRAPH>\n{GRAPH}\n</GRAPH>"
)

DEFAULT_TOKEN_BUDGET = 200_000

GRAPH_PLACEHOLDER = "{GRAPH}"


class BudgetError(Exception):
    """The prompt cannot fit the session token budget."""


class SessionBusyError(Exception):
    """A completion is already streaming on this session."""


@dataclass
class ChatMessage:
    """One conversation turn.

    Attributes:
        role: "system", "user", or "assistant".
        content: message text.
        created: epoch seconds when the message was recorded.
    """

    role: str
    content: str
    created: float = field(default_factory=time.time)

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content, "created": self.created}

    @classmethod
    def from_dict(cls, data: dict) -> "ChatMessage":
        return cls(role=data["role"], content=data["content"], created=data.get("created", 0.0))


@dataclass
class ChatSession:
    """A chat conversation grounded in one serialized graph."""

    session_id: str
    system_prompt: str
    token_budget: int
    history: List[ChatMessage] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "sessionId": self.session_id,
            "systemPrompt": self.system_prompt,
            "tokenBudget": self.token_budget,
            "history": [m.to_dict() for m in self.history],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChatSession":
        return cls(
            session_id=data["sessionId"],
            system_prompt=data["systemPrompt"],
            token_budget=int(data["tokenBudget"]),
            history=[ChatMessage.from_dict(m) for m in data.get("history", [])],
        )


def new_session(
    graph: PropertyGraph,
    system_template: str = DEFAULT_SYSTEM_TEMPLATE,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
    session_id: Optional[str] = None,
) -> ChatSession:
    """Create a session with the graph spliced into the system template.

    Raises:
        ValueError: the template has no graph placeholder.
        BudgetError: the serialized graph alone exceeds the budget.
    """
    if GRAPH_PLACEHOLDER not in system_template:
        raise ValueError(f"system template must contain {GRAPH_PLACEHOLDER}")
    context = export_graphml(graph)
    context_tokens = estimate_tokens(context).token_count
    if context_tokens >= token_budget:
        raise BudgetError(
            f"graph context is ~{context_tokens} tokens, over the budget of "
            f"{token_budget}; condense the graph or raise the budget"
        )
    system_prompt = system_template.replace(GRAPH_PLACEHOLDER, context)
    return ChatSession(
        session_id=session_id or uuid.uuid4().hex,
        system_prompt=system_prompt,
        token_budget=token_budget,
    )


def _prompt_tokens(messages: List[dict]) -> int:
    return sum(estimate_tokens(m["content"]).token_count for m in messages)


def build_prompt(session: ChatSession, question: str) -> List[dict]:
    """Assemble provider-ready messages under the session budget.

    History is trimmed oldest user/assistant pair first. The system
    message is never dropped.

    Raises:
        ValueError: empty question.
        BudgetError: system prompt plus the question alone are over budget.
    """
    if not question or not question.strip():
        raise ValueError("question must be non-empty")
    history = [{"role": m.role, "content": m.content} for m in session.history]
    while True:
        messages = [{"role": "system", "content": session.system_prompt}] + history
        messages.append({"role": "user", "content": question})
        if _prompt_tokens(messages) <= session.token_budget:
            return messages
        if not history:
            raise BudgetError(
                "system prompt and question exceed the token budget even with "
                "an empty history"
            )
        history = history[2:] if len(history) >= 2 else []


def ask(session: ChatSession, question: str, provider: Provider) -> Iterator[str]:
    """Stream an answer to the question, updating history on success.

    Yields text chunks in provider order. History gains the user/assistant
    pair only after the stream completes; a mid-stream provider error
    propagates and leaves history unchanged. A second ask while one is
    streaming raises SessionBusyError.
    """
    if not session._lock.acquire(blocking=False):
        raise SessionBusyError("a completion is already in progress for this session")
    try:
        messages = build_prompt(session, question)
        upstream = provider.stream(messages)
    except BaseException:
        session._lock.release()
        raise

    def generate() -> Iterator[str]:
        pieces: List[str] = []
        try:
            for chunk in upstream:
                pieces.append(chunk)
                yield chunk
            answer = "".join(pieces)
            session.history.append(ChatMessage(role="user", content=question))
            session.history.append(ChatMessage(role="assistant", content=answer))
        finally:
            session._lock.release()

    return generate()


def ask_text(session: ChatSession, question: str, provider: Provider) -> str:
    """Convenience wrapper: run ask() to completion and join the chunks."""
    return "".join(ask(session, question, provider))
