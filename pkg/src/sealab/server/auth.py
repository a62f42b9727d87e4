"""Token auth against a local user file.

Login checks a salted SHA-256 of the password and issues an opaque bearer
token.  The same user id may hold any number of concurrent tokens (a class
sharing one login across devices is a supported mode of use).
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field

from ..errors import AuthError


def hash_password(password: str, salt: str) -> str:
    return hashlib.sha256((salt + password).encode()).hexdigest()


@dataclass
class UserSession:
    user_id: str
    display_name: str
    active_login_count: int = 0
    prelab_progress: dict = field(default_factory=dict)


class Auth:
    def __init__(self, users: list):
        self.users = {u["user_id"]: u for u in users}
        self.tokens: dict = {}
        self.sessions: dict = {}

    def login(self, user_id: str, password: str) -> str:
        user = self.users.get(user_id)
        if user is None or hash_password(password, user["salt"]) != user["password_sha256"]:
            raise AuthError("unknown user or wrong password")
        token = secrets.token_hex(16)
        self.tokens[token] = user_id
        session = self.sessions.setdefault(
            user_id, UserSession(user_id=user_id, display_name=user["display_name"])
        )
        session.active_login_count += 1
        return token

    def resolve(self, token: str | None) -> UserSession:
        if not token or token not in self.tokens:
            raise AuthError("missing or invalid token")
        return self.sessions[self.tokens[token]]
