from .history import TickRecord, TrajectoryBuffer
from .backends import (
    Backend,
    BackendCall,
    HttpBackend,
    NullBackend,
    ScriptedBackend,
    SleepingBackend,
    extract_blocks,
    make_backend,
)
from .prompts import PromptKit, load_asset
from .service import Belief, Guidelines, System2Config, System2Service

__all__ = [
    "Backend",
    "BackendCall",
    "Belief",
    "Guidelines",
    "HttpBackend",
    "NullBackend",
    "PromptKit",
    "ScriptedBackend",
    "SleepingBackend",
    "System2Config",
    "System2Service",
    "TickRecord",
    "TrajectoryBuffer",
    "extract_blocks",
    "load_asset",
    "make_backend",
]
