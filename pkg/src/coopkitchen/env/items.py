"""Game objects: bare items, plates, and the (name, status) catalog.

Every object is identified by a ``(name, status)`` tuple. Plates are
containers over the three base ingredients; a plate's visible identity is
derived from its contents (an empty plate reads ``("Plate", "Empty")``, a
plate holding beef and bread reads ``("BeefBurger", "")``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

BEEF = "Beef"
LETTUCE = "Lettuce"
BREAD = "Bread"
PLATE = "Plate"
FIRE_EXTINGUISHER = "FireExtinguisher"
FIRE = "Fire"

FRESH = "Fresh"
IN_PROGRESS = "In-progress"
WELL_COOKED = "Well-cooked"
OVERCOOKED = "Overcooked"
UNCHOPPED = "Unchopped"
CHOPPED = "Chopped"

BURGER_NAMES = ("BeefBurger", "LettuceBurger", "BeefLettuceBurger")
BURGER_VALUES = {"LettuceBurger": 15, "BeefBurger": 20, "BeefLettuceBurger": 25}

# Ingredient sets that a plate may hold, and the identity they produce.
PLATE_CONTENTS_TO_NAME = {
    frozenset(): (PLATE, "Empty"),
    frozenset({BEEF}): (BEEF, WELL_COOKED),
    frozenset({LETTUCE}): (LETTUCE, CHOPPED),
    frozenset({BREAD}): (BREAD, ""),
    frozenset({BEEF, LETTUCE}): ("BeefLettuce", ""),
    frozenset({BEEF, BREAD}): ("BeefBurger", ""),
    frozenset({LETTUCE, BREAD}): ("LettuceBurger", ""),
    frozenset({BEEF, LETTUCE, BREAD}): ("BeefLettuceBurger", ""),
}

BURGER_INGREDIENTS = {
    "LettuceBurger": frozenset({LETTUCE, BREAD}),
    "BeefBurger": frozenset({BEEF, BREAD}),
    "BeefLettuceBurger": frozenset({BEEF, LETTUCE, BREAD}),
}

# Catalog order matches the structured state example handed to agents.
OBJECT_CATALOG: tuple[tuple[str, str], ...] = (
    (BEEF, FRESH),
    (BEEF, IN_PROGRESS),
    (BEEF, WELL_COOKED),
    (BEEF, OVERCOOKED),
    (LETTUCE, UNCHOPPED),
    (LETTUCE, CHOPPED),
    (BREAD, ""),
    ("BeefLettuce", ""),
    ("BeefBurger", ""),
    ("LettuceBurger", ""),
    ("BeefLettuceBurger", ""),
    (PLATE, "Empty"),
    (FIRE_EXTINGUISHER, ""),
    (FIRE, ""),
)

VALID_STATUSES = {
    BEEF: {FRESH, IN_PROGRESS, WELL_COOKED, OVERCOOKED},
    LETTUCE: {UNCHOPPED, CHOPPED},
    BREAD: {""},
    FIRE_EXTINGUISHER: {""},
}


@dataclass
class Item:
    """A bare (unplated) object: an ingredient or the fire extinguisher.

    ``progress`` tracks the active phase: cook fraction for in-progress
    beef, overcook fraction for well-cooked beef on a pan, and completed
    chop interacts for lettuce on a cutboard.
    """

    uid: int
    name: str
    status: str
    progress: float = 0.0
    cooked_by: int | None = None  # who put this beef on a pan
    chopped_by: int | None = None  # who landed the final chop

    def key(self) -> tuple[str, str]:
        return (self.name, self.status)

    def to_dict(self) -> dict:
        return {
            "uid": self.uid,
            "name": self.name,
            "status": self.status,
            "progress": round(self.progress, 6),
            "cooked_by": self.cooked_by,
            "chopped_by": self.chopped_by,
        }


@dataclass
class Plate:
    """A plate container; contents accumulate toward a burger."""

    uid: int
    fetched_by: int | None = None  # who took it from the plate station
    contents: dict[str, Item] = field(default_factory=dict)
    added_by: dict[str, int] = field(default_factory=dict)

    def key(self) -> tuple[str, str]:
        return PLATE_CONTENTS_TO_NAME[frozenset(self.contents)]

    def can_accept(self, ingredient: str) -> bool:
        if ingredient in self.contents:
            return False
        return frozenset(self.contents) | {ingredient} in PLATE_CONTENTS_TO_NAME

    def add(self, item: Item, actor: int) -> None:
        ingredient = item.name
        self.contents[ingredient] = item
        self.added_by[ingredient] = actor

    def to_dict(self) -> dict:
        return {
            "uid": self.uid,
            "plate": True,
            "fetched_by": self.fetched_by,
            "contents": {k: v.to_dict() for k, v in sorted(self.contents.items())},
            "added_by": dict(sorted(self.added_by.items())),
        }


Unit = Item | Plate


def derived_name(unit: Unit) -> tuple[str, str]:
    """The catalog identity of a bare item or a plate with contents."""
    return unit.key()


def plateable(item: Item) -> bool:
    """Only finished ingredients go on plates."""
    return (
        (item.name == BEEF and item.status == WELL_COOKED)
        or (item.name == LETTUCE and item.status == CHOPPED)
        or item.name == BREAD
    )
