from .app import create_app, create_app_from_config, placeholder_glyph
from .state import ServiceConfig, SessionState, load_session

__all__ = [
    "ServiceConfig",
    "SessionState",
    "create_app",
    "create_app_from_config",
    "load_session",
    "placeholder_glyph",
]
