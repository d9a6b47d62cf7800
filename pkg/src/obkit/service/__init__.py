"""Session-oriented annotation HTTP service."""

from .app import create_app
from .store import SessionState, SessionStore

__all__ = ["SessionState", "SessionStore", "create_app"]
