"""Local accounts and bearer-token sessions (directory-service stand-in)."""

from __future__ import annotations

import secrets
import time
from dataclasses import dataclass

from ..config import UserAccount, verify_password


class InvalidCredential(ValueError):
    pass


class InvalidToken(ValueError):
    pass


@dataclass(frozen=True)
class SessionToken:
    token: str
    user: str
    role: str
    expires_at: float

    @property
    def expired(self) -> bool:
        return time.time() >= self.expires_at


class SessionStore:
    def __init__(self, users: list[UserAccount], ttl_seconds: int = 3600):
        self._users = {u.username: u for u in users}
        self._ttl = ttl_seconds
        self._sessions: dict[str, SessionToken] = {}

    def login(self, username: str, password: str) -> SessionToken:
        account = self._users.get(username)
        if account is None or not verify_password(password, account.password_hash):
            raise InvalidCredential("bad username or password")
        token = SessionToken(
            token=secrets.token_hex(16),
            user=account.username,
            role=account.role,
            expires_at=time.time() + self._ttl,
        )
        self._sessions[token.token] = token
        return token

    def resolve(self, bearer: str | None) -> SessionToken:
        if not bearer:
            raise InvalidToken("missing bearer token")
        session = self._sessions.get(bearer)
        if session is None:
            raise InvalidToken("unknown token")
        if session.expired:
            del self._sessions[bearer]
            raise InvalidToken("token expired")
        return session
