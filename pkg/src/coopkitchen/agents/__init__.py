from .base import Agent, TickContext
from .dpt import DptAgent
from .baselines import ActAgent
from .partners import HumanProxy, RulePartner
from .factory import AGENT_KINDS, build_agent

__all__ = [
    "AGENT_KINDS",
    "ActAgent",
    "Agent",
    "DptAgent",
    "HumanProxy",
    "RulePartner",
    "TickContext",
    "build_agent",
]
