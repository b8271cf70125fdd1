from .session import Session, SessionManager, build_frame
from .app import create_app

__all__ = ["Session", "SessionManager", "build_frame", "create_app"]
