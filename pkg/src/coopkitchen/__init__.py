"""Real-time cooperative kitchen simulation and hybrid fast/slow agents.

The package is organized around a tick-driven kitchen world (`env`), a macro
action compiler with grid path planning (`executor`), a safe expression
language for model-written task policies (`dsl`), a fast FSM controller
(`system1`), an asynchronous reasoning loop (`system2`), agent assemblies
(`agents`), episode metrics (`metrics`), an experiment runner (`harness`),
and a live-play websocket server (`server`).
"""

__version__ = "0.1.0"
