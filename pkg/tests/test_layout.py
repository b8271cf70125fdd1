import pytest

from coopkitchen.env.layout import CellKind, parse_layout
from coopkitchen.errors import ParseError, ValidationError


def test_empty_string_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_layout("")


def test_unknown_character_reports_position():
    text = "###\n#?S\n#1#\n"
    with pytest.raises(ParseError) as exc:
        parse_layout(text)
    assert exc.value.line == 2
    assert exc.value.col == 2


def test_walled_cell_without_serving_area_fails_validation():
    text = "###\n#1#\n###\n"
    with pytest.raises(ValidationError):
        parse_layout(text)


def test_missing_spawn_fails_validation():
    text = "###\n#.S\n###\n"
    with pytest.raises(ValidationError):
        parse_layout(text)


def test_ragged_rows_rejected():
    with pytest.raises(ParseError):
        parse_layout("####\n#1S#X\n####\n")


def test_minimal_kitchen_parses():
    layout = parse_layout("#####\n#1.S#\n#A.U#\n#####\n")
    assert layout.width == 5
    assert layout.height == 4
    assert layout.spawns == ((1, 1),)
    assert layout.kind((3, 1)) == CellKind.SERVING
    assert layout.kind((1, 2)) == CellKind.PAN


def test_counter_circuit_has_two_regions_split_by_center_ring(counter_circuit):
    regions = counter_circuit.floor_regions()
    assert len(regions) == 2
    spawn_regions = [counter_circuit.region_of(s) for s in counter_circuit.spawns]
    assert spawn_regions[0] is not spawn_regions[1]
    assert spawn_regions[0] != spawn_regions[1]
    # The boundary between the regions is made of center counters and the
    # stations embedded in the ring.
    assert len(counter_circuit.center_counters) >= 10


def test_counter_circuit_regions_each_have_pan_and_cutboard(counter_circuit):
    for spawn in counter_circuit.spawns:
        region = counter_circuit.region_of(spawn)
        for kind in (CellKind.PAN, CellKind.CUTBOARD):
            cells = counter_circuit.cells_of(kind)
            assert any(
                n in region for pos in cells for n in counter_circuit.neighbors(pos)
            ), f"region of {spawn} lacks {kind}"


def test_asymmetric_advantages_is_a_split_kitchen(asymmetric_advantages):
    assert len(asymmetric_advantages.floor_regions()) == 2
    assert len(asymmetric_advantages.cells_of(CellKind.SERVING)) == 2


def test_counter_census_count(counter_circuit):
    # 23 center counters + 7 plain counters + 1 extinguisher home
    assert len(counter_circuit.counters) == 31
