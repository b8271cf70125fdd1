"""Agent-facing structured snapshots of the game state.

The document is a full census keyed by ``(name, status)``: world items, the
viewer's held item, and plate contents all count under ``objects``; the
other player's held item is reported separately under
``inventory_other_player`` so picking something up moves it between the two
sections without changing the total.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .items import FIRE, OBJECT_CATALOG, derived_name
from .state import GameState


@dataclass
class StateDocument:
    objects: dict[tuple[str, str], int]
    counters: dict[str, int]
    orders: list[dict]
    inventory_other_player: dict[str, tuple[str, str]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        """Plain-data view handed to condition expressions."""
        return {
            "objects": dict(self.objects),
            "counters": dict(self.counters),
            "orders": [dict(o) for o in self.orders],
            "inventory_other_player": dict(self.inventory_other_player),
        }

    def count(self, name: str, status: str = "") -> int:
        return self.objects.get((name, status), 0)

    def to_jsonable(self) -> dict:
        """JSON-safe form (tuple keys flattened) for logs and wire frames."""
        return {
            "objects": {f"{n}|{s}": c for (n, s), c in self.objects.items()},
            "counters": dict(self.counters),
            "orders": [dict(o) for o in self.orders],
            "inventory_other_player": {
                k: list(v) for k, v in self.inventory_other_player.items()
            },
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "StateDocument":
        objects = {}
        for key, count in data["objects"].items():
            name, _, status = key.partition("|")
            objects[(name, status)] = count
        return cls(
            objects=objects,
            counters=dict(data["counters"]),
            orders=[dict(o) for o in data["orders"]],
            inventory_other_player={
                k: tuple(v) for k, v in data.get("inventory_other_player", {}).items()
            },
        )


def snapshot_document(state: GameState, viewer: int) -> StateDocument:
    if viewer >= len(state.players):
        raise ValueError(f"no such player: {viewer}")

    objects: dict[tuple[str, str], int] = {key: 0 for key in OBJECT_CATALOG}
    inventory: dict[str, tuple[str, str]] = {}

    for where, unit in state.iter_units():
        key = derived_name(unit)
        if where.startswith("held:"):
            holder = int(where.split(":")[1])
            if holder != viewer:
                inventory[f"player_{holder}"] = key
                continue
        objects[key] = objects.get(key, 0) + 1

    objects[(FIRE, "")] = len(state.fires())

    empty = sum(1 for pos in state.layout.counters if pos not in state.surfaces)
    orders = [{"name": o.name, "remain_time": o.remain_time} for o in state.orders]
    return StateDocument(
        objects=objects,
        counters={"Empty": empty},
        orders=orders,
        inventory_other_player=inventory,
    )


def render_document(doc: StateDocument) -> str:
    """Python-literal text form used in prompts (tuple keys, 4-space indent)."""
    lines = ["{", '    "objects": {']
    for (name, status) in OBJECT_CATALOG:
        count = doc.objects.get((name, status), 0)
        lines.append(f'        ("{name}", "{status}"): {count},')
    extra = [k for k in doc.objects if k not in set(OBJECT_CATALOG)]
    for (name, status) in sorted(extra):
        lines.append(f'        ("{name}", "{status}"): {doc.objects[(name, status)]},')
    lines[-1] = lines[-1].rstrip(",")
    lines.append("    },")
    lines.append('    "counters": {')
    for key, count in doc.counters.items():
        lines.append(f'        "{key}": {count},')
    lines.append("    },")
    lines.append('    "orders": [')
    for order in doc.orders:
        lines.append("        {")
        lines.append(f'            "name": "{order["name"]}",')
        lines.append(f'            "remain_time": {order["remain_time"]}')
        lines.append("        },")
    if doc.orders:
        lines[-1] = lines[-1].rstrip(",")
    lines.append("    ],")
    lines.append('    "inventory_other_player": {')
    for player, (name, status) in doc.inventory_other_player.items():
        lines.append(f'        "{player}": ("{name}", "{status}"),')
    lines.append("    }")
    lines.append("}")
    return "\n".join(lines)
