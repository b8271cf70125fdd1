"""Kitchen layout: grid geometry, cell kinds, and the ASCII file format.

Layout files are UTF-8 text, one character per cell, newline-separated rows:

    ``#`` wall            ``.`` floor           ``C`` counter
    ``X`` center counter  ``B`` beef station    ``L`` lettuce station
    ``D`` bread station   ``P`` plate station   ``U`` cutboard
    ``A`` pan             ``S`` serving area    ``E`` extinguisher home
    ``1``/``2`` player spawn points (floor cells)

Center counters are the designated pass-on surface between work regions.
The extinguisher home behaves like a counter that starts holding the
fire extinguisher.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from ..errors import ParseError, ValidationError

Pos = tuple[int, int]  # (x, y) with y growing downward


class CellKind(Enum):
    FLOOR = "floor"
    WALL = "wall"
    COUNTER = "counter"
    CENTER_COUNTER = "center_counter"
    BEEF_STATION = "beef_station"
    LETTUCE_STATION = "lettuce_station"
    BREAD_STATION = "bread_station"
    PLATE_STATION = "plate_station"
    CUTBOARD = "cutboard"
    PAN = "pan"
    SERVING = "serving"
    EXTINGUISHER_HOME = "extinguisher_home"


CHAR_TO_KIND = {
    "#": CellKind.WALL,
    ".": CellKind.FLOOR,
    "C": CellKind.COUNTER,
    "X": CellKind.CENTER_COUNTER,
    "B": CellKind.BEEF_STATION,
    "L": CellKind.LETTUCE_STATION,
    "D": CellKind.BREAD_STATION,
    "P": CellKind.PLATE_STATION,
    "U": CellKind.CUTBOARD,
    "A": CellKind.PAN,
    "S": CellKind.SERVING,
    "E": CellKind.EXTINGUISHER_HOME,
}
KIND_TO_CHAR = {v: k for k, v in CHAR_TO_KIND.items()}

# Surfaces items may rest on (stations are dispensers, pans/cutboards are
# tracked separately).
COUNTER_KINDS = frozenset(
    {CellKind.COUNTER, CellKind.CENTER_COUNTER, CellKind.EXTINGUISHER_HOME}
)
STATION_KINDS = frozenset(
    {
        CellKind.BEEF_STATION,
        CellKind.LETTUCE_STATION,
        CellKind.BREAD_STATION,
        CellKind.PLATE_STATION,
    }
)


@dataclass(frozen=True)
class Layout:
    """Immutable kitchen geometry."""

    width: int
    height: int
    cells: tuple[tuple[CellKind, ...], ...]  # cells[y][x]
    spawns: tuple[Pos, ...]  # index = player index
    source: str = field(default="", compare=False)

    def kind(self, pos: Pos) -> CellKind:
        x, y = pos
        return self.cells[y][x]

    def in_bounds(self, pos: Pos) -> bool:
        x, y = pos
        return 0 <= x < self.width and 0 <= y < self.height

    def is_floor(self, pos: Pos) -> bool:
        return self.in_bounds(pos) and self.kind(pos) == CellKind.FLOOR

    def cells_of(self, kind: CellKind) -> list[Pos]:
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if self.cells[y][x] == kind
        ]

    @property
    def center_counters(self) -> list[Pos]:
        return self.cells_of(CellKind.CENTER_COUNTER)

    @property
    def counters(self) -> list[Pos]:
        """All surfaces that can hold an item, in row-major order."""
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if self.cells[y][x] in COUNTER_KINDS
        ]

    def cell_index(self, pos: Pos) -> int:
        """Row-major index used as the deterministic tie-breaker."""
        return pos[1] * self.width + pos[0]

    def neighbors(self, pos: Pos) -> list[Pos]:
        x, y = pos
        return [
            p
            for p in ((x, y - 1), (x, y + 1), (x - 1, y), (x + 1, y))
            if self.in_bounds(p)
        ]

    def floor_regions(self) -> list[set[Pos]]:
        """Connected components of floor cells (flood fill)."""
        seen: set[Pos] = set()
        regions: list[set[Pos]] = []
        for y in range(self.height):
            for x in range(self.width):
                start = (x, y)
                if self.cells[y][x] != CellKind.FLOOR or start in seen:
                    continue
                region = {start}
                frontier = [start]
                while frontier:
                    cur = frontier.pop()
                    for nxt in self.neighbors(cur):
                        if nxt not in region and self.is_floor(nxt):
                            region.add(nxt)
                            frontier.append(nxt)
                seen |= region
                regions.append(region)
        return regions

    def region_of(self, pos: Pos) -> set[Pos]:
        for region in self.floor_regions():
            if pos in region:
                return region
        return set()


def parse_layout(text: str) -> Layout:
    """Parse the ASCII grid format and validate kitchen invariants."""
    if not text.strip():
        raise ParseError("empty layout")
    rows = [line for line in text.splitlines() if line.strip()]
    width = len(rows[0])
    spawns: dict[int, Pos] = {}
    cells: list[list[CellKind]] = []
    for y, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(
                f"ragged row: expected {width} cells, got {len(row)}", line=y + 1, col=len(row)
            )
        out: list[CellKind] = []
        for x, ch in enumerate(row):
            if ch in ("1", "2"):
                spawns[int(ch) - 1] = (x, y)
                out.append(CellKind.FLOOR)
            elif ch in CHAR_TO_KIND:
                out.append(CHAR_TO_KIND[ch])
            else:
                raise ParseError(f"unknown cell character {ch!r}", line=y + 1, col=x + 1)
        cells.append(out)

    layout = Layout(
        width=width,
        height=len(rows),
        cells=tuple(tuple(r) for r in cells),
        spawns=tuple(spawns[i] for i in sorted(spawns)),
        source=text,
    )
    _validate(layout)
    return layout


def _validate(layout: Layout) -> None:
    if not layout.spawns:
        raise ValidationError("layout has no spawn points")
    if not layout.cells_of(CellKind.SERVING):
        raise ValidationError("layout has no serving area")

    regions = layout.floor_regions()
    spawn_regions = []
    for spawn in layout.spawns:
        region = next((r for r in regions if spawn in r), None)
        if region is None:
            raise ValidationError(f"spawn {spawn} is not on a floor cell")
        spawn_regions.append(region)

    reachable = set().union(*spawn_regions)
    for kind in (
        CellKind.BEEF_STATION,
        CellKind.LETTUCE_STATION,
        CellKind.BREAD_STATION,
        CellKind.PLATE_STATION,
        CellKind.CUTBOARD,
        CellKind.PAN,
        CellKind.SERVING,
    ):
        for pos in layout.cells_of(kind):
            if not any(n in reachable for n in layout.neighbors(pos)):
                raise ValidationError(f"{kind.value} at {pos} is unreachable from every spawn")

    # Split kitchens need cooking and chopping capacity on both sides.
    if len(layout.spawns) >= 2 and len(set(map(frozenset, spawn_regions))) > 1:
        for region in spawn_regions:
            for kind in (CellKind.PAN, CellKind.CUTBOARD):
                cells = layout.cells_of(kind)
                if not any(n in region for pos in cells for n in layout.neighbors(pos)):
                    raise ValidationError(
                        f"split layout region lacks an adjacent {kind.value}"
                    )


def load_layout(path: str | Path) -> Layout:
    return parse_layout(Path(path).read_text(encoding="utf-8"))


def builtin_layout_path(name: str) -> Path:
    """Path of a layout shipped with the package (e.g. ``new_counter_circuit``)."""
    root = resources.files(__package__) / "layouts" / f"{name}.layout"
    with resources.as_file(root) as p:
        return Path(p)
