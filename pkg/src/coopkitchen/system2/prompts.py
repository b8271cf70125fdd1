"""Prompt assembly from versioned text assets.

Templates use ``{PLACEHOLDER}`` tokens replaced literally (no str.format:
the assets are full of JSON braces). A prompt is system text plus one user
message: game introduction, instructions, and a framework-specific output
section. The with/without-ToM variants differ exactly in the inferred-human
placeholder and the belief section of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from ..dsl.tasks import AssignedTask, render_assigned_tasks
from ..env.document import StateDocument
from .history import TickRecord, compact_document, render_history

INFERRED_HUMAN_SECTION = (
    "**Inferred Human Behavior**:\n"
    "    - The inference on the human player's behavior pattern you have made "
    "based on the game history."
)

_ASSET_CACHE: dict[str, str] = {}


def load_asset(name: str) -> str:
    if name not in _ASSET_CACHE:
        _ASSET_CACHE[name] = (
            resources.files(__package__).joinpath("assets", f"{name}.txt").read_text("utf-8")
        )
    return _ASSET_CACHE[name]


def fill(template: str, mapping: dict[str, str]) -> str:
    out = template
    for key, value in mapping.items():
        out = out.replace("{" + key + "}", value)
    return out


@dataclass
class PromptKit:
    """Renders the per-job message lists for one agent configuration."""

    framework: str = "dpt"  # dpt | react | reflexion | act
    include_tom: bool = True
    agent_player: int = 0

    def _instructions(self, input_text: str) -> str:
        return fill(
            load_asset("instructions"),
            {
                "MESSAGE_PROMPT": "",
                "INFERRED_HUMAN_PROMPT": INFERRED_HUMAN_SECTION if self.include_tom else "",
                "GAME_STATE_EXAMPLE": load_asset("game_state_example").strip(),
                "ASSIGNED_TASKS_EXAMPLE": load_asset("assigned_tasks_example").strip(),
                "LATEST_MESSAGE_PROMPT": "",
                "FEW_SHOT_EXAMPLE": "",
                "INPUT": input_text,
            },
        )

    def _messages(self, input_text: str, output_asset: str) -> list[dict]:
        output = fill(load_asset(output_asset), {"MESSAGE_OUTPUT_FORMAT": ""})
        user = "\n\n".join(
            [load_asset("game_intro").strip(), self._instructions(input_text), output.strip()]
        )
        return [
            {"role": "system", "content": load_asset("system_prompt").strip()},
            {"role": "user", "content": user},
        ]

    def _input_sections(
        self,
        history: list[TickRecord],
        *,
        current: StateDocument | None = None,
        tasks: list[AssignedTask] | None = None,
        guidelines: str | None = None,
        belief: str | None = None,
        diagnostics: list[str] | None = None,
        thought: str | None = None,
    ) -> str:
        parts = [
            "**Game History**:",
            render_history(history, self.agent_player),
        ]
        if current is not None:
            parts += ["", "**Current Game State**:", compact_document(current)]
        if tasks is not None:
            parts += ["", "**Current Assigned Tasks**:", render_assigned_tasks(tasks)]
        if guidelines is not None:
            parts += ["", "**Behavior Guidelines**:", guidelines or "(none yet)"]
        if self.include_tom and belief is not None:
            parts += ["", "**Inferred Human Behavior**:", belief or "(none yet)"]
        if thought is not None:
            parts += ["", "**Previous Thought**:", thought or "(none yet)"]
        if diagnostics:
            parts += ["", "**Previous Output Errors**:"] + [f"- {d}" for d in diagnostics]
        return "\n".join(parts)

    # -- job-specific renderings ------------------------------------------

    def tom_messages(self, history: list[TickRecord], prev_belief: str | None) -> list[dict]:
        body = "\n".join(
            [
                "**Game History**:",
                render_history(history, self.agent_player),
                "",
                "**Previous Inference**:",
                prev_belief or "(none yet)",
            ]
        )
        return self._messages(body, "output_tom")

    def reflection_messages(
        self, history: list[TickRecord], belief: str | None, prev_guidelines: str | None
    ) -> list[dict]:
        parts = [
            "**Game History**:",
            render_history(history, self.agent_player),
            "",
            "**Behavior Guidelines**:",
            prev_guidelines or "(none yet)",
        ]
        if self.include_tom:
            parts += ["", "**Inferred Human Behavior**:", belief or "(none yet)"]
        return self._messages("\n".join(parts), "output_reflection")

    def generation_messages(
        self,
        window: list[TickRecord],
        *,
        current: StateDocument,
        tasks: list[AssignedTask],
        guidelines: str | None,
        belief: str | None,
        diagnostics: list[str] | None = None,
        thought: str | None = None,
    ) -> list[dict]:
        output_asset = {
            "dpt": "output_cap",
            "react": "output_react",
            "reflexion": "output_reflexion",
        }.get(self.framework, "output_cap")
        body = self._input_sections(
            window,
            current=current,
            tasks=tasks,
            guidelines=guidelines,
            belief=belief if self.include_tom else None,
            diagnostics=diagnostics,
            thought=thought,
        )
        return self._messages(body, output_asset)

    def act_messages(self, history: list[TickRecord], current: StateDocument) -> list[dict]:
        body = self._input_sections(history, current=current)
        return self._messages(body, "output_act")
