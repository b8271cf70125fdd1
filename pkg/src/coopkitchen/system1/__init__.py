from .fsm import DecideOutcome, FsmLabel, TaskQueue, apply_assigned_tasks, decide, pipeline_next
from .controller import MacroRecord, System1Controller, TickTrace

__all__ = [
    "DecideOutcome",
    "FsmLabel",
    "MacroRecord",
    "System1Controller",
    "TaskQueue",
    "TickTrace",
    "apply_assigned_tasks",
    "decide",
    "pipeline_next",
]
