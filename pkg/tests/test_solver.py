import json

import pytest

from roomforge.cluster import compute_cluster_extents
from roomforge.scene import (
    ABOVE,
    ADJACENT,
    LEFT_OF,
    NOT_ADJACENT,
    ON,
    RIGHT_OF,
    UNDER,
    Room,
)
from roomforge.solver import (
    SOLVED,
    UNSAT,
    FeasibleRegion,
    ParentUnplaced,
    SolverConfig,
    feasible_region,
    sanctioned_pairs,
    solve_layout,
    verify_layout,
)

from .conftest import edge, graph_of, obj
from .oracles import oracle_solve


def cfg(**kw):
    return SolverConfig(**kw)


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        cfg(samples_per_object=0)
    with pytest.raises(ValueError):
        cfg(max_backtracks=-1)
    with pytest.raises(ValueError):
        cfg(nonadjacent_range=(1.5, 0.3))


def test_region_bed_in_middle(room):
    g = graph_of(
        room,
        [obj("bed_1", size=(2.0, 1.6, 0.5))],
        [edge("middle_of_room", "bed_1", ON)],
    )
    region = feasible_region("bed_1", g, {}, cfg())
    assert region.lo == pytest.approx((1.0, 0.8, 0.25))
    assert region.hi == pytest.approx((3.0, 2.2, 0.25))


def test_region_chair_left_of_placed_table(room):
    g = graph_of(
        room,
        [obj("table_1", size=(1.0, 0.9, 0.75)), obj("chair_1", size=(0.5, 0.5, 0.9))],
        [edge("floor", "table_1", ON), edge("table_1", "chair_1", LEFT_OF, ADJACENT)],
    )
    region = feasible_region("chair_1", g, {"table_1": (2.0, 1.5, 0.375)}, cfg())
    assert region.lo == pytest.approx((1.20, 1.3, 0.45))
    assert region.hi == pytest.approx((1.25, 1.7, 0.45))


def test_region_empty_when_parent_flush_against_wall(room):
    g = graph_of(
        room,
        [obj("table_1", size=(1.0, 0.9, 0.75)), obj("chair_1", size=(0.5, 0.5, 0.9))],
        [edge("floor", "table_1", ON), edge("table_1", "chair_1", LEFT_OF, ADJACENT)],
    )
    region = feasible_region("chair_1", g, {"table_1": (0.5, 1.5, 0.375)}, cfg())
    assert region.empty


def test_region_corner_picks_min_end_of_wall(room):
    g = graph_of(
        room,
        [obj("shelf_1", size=(0.8, 0.3, 1.8))],
        [edge("wall_west", "shelf_1", "in_the_corner", ADJACENT)],
    )
    region = feasible_region("shelf_1", g, {}, cfg())
    # west wall's south end: both coordinates hug the southwest corner
    assert region.lo == pytest.approx((0.4, 0.15, 0.9))
    assert region.hi == pytest.approx((0.45, 0.2, 0.9))


def test_region_under_requires_clearance(room):
    g = graph_of(
        room,
        [obj("table_1", size=(1.0, 0.9, 0.75)), obj("box_1", size=(0.3, 0.3, 0.4))],
        [edge("floor", "table_1", ON), edge("table_1", "box_1", UNDER)],
    )
    # floor-standing parent leaves no clearance underneath
    region = feasible_region("box_1", g, {"table_1": (2.0, 1.5, 0.375)}, cfg())
    assert region.empty


def test_region_under_wall_shelf(room):
    g = graph_of(
        room,
        [obj("shelf_1", size=(0.8, 0.2, 0.1)), obj("basket_1", size=(0.3, 0.1, 0.4))],
        [edge("wall_north", "shelf_1", ON, ADJACENT), edge("shelf_1", "basket_1", UNDER)],
    )
    region = feasible_region("basket_1", g, {"shelf_1": (2.0, 2.8, 1.5)}, cfg())
    assert region.lo == pytest.approx((1.75, 2.75, 0.2))
    assert region.hi == pytest.approx((2.25, 2.85, 0.2))


def test_region_raises_when_parent_unplaced(room):
    g = graph_of(
        room,
        [obj("table_1"), obj("lamp_1")],
        [edge("floor", "table_1", ON), edge("table_1", "lamp_1", ON)],
    )
    with pytest.raises(ParentUnplaced):
        feasible_region("lamp_1", g, {}, cfg())


def test_sanctioned_pairs_only_object_edges(room):
    g = graph_of(
        room,
        [obj("table_1"), obj("lamp_1")],
        [edge("floor", "table_1", ON), edge("table_1", "lamp_1", ON)],
    )
    assert sanctioned_pairs(g) == {frozenset(("table_1", "lamp_1"))}


def _bedroom(room=None):
    room = room or Room(4.0, 3.0, 2.4)
    return graph_of(
        room,
        [
            obj("bed_1", size=(2.0, 1.6, 0.5)),
            obj("nightstand_1", size=(0.4, 0.4, 0.5)),
            obj("lamp_1", size=(0.2, 0.2, 0.4)),
            obj("wardrobe_1", size=(1.0, 0.6, 2.0)),
            obj("rug_1", size=(1.6, 1.0, 0.02)),
        ],
        [
            edge("middle_of_room", "bed_1", ON),
            edge("bed_1", "nightstand_1", LEFT_OF, ADJACENT),
            edge("nightstand_1", "lamp_1", ON),
            edge("wall_north", "wardrobe_1", "in_the_corner", ADJACENT),
            edge("floor", "rug_1", ON),
        ],
    )


def test_solve_bedroom_and_verify():
    g = compute_cluster_extents(_bedroom())
    layout = solve_layout(g, cfg(seed=11))
    assert layout.status == SOLVED
    assert set(layout.placements) == {"bed_1", "nightstand_1", "lamp_1", "wardrobe_1", "rug_1"}
    assert verify_layout(g, layout) == []


def test_solve_is_deterministic():
    g = compute_cluster_extents(_bedroom())
    a = solve_layout(g, cfg(seed=7)).to_document()
    b = solve_layout(g, cfg(seed=7)).to_document()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_seed_changes_placements():
    g = compute_cluster_extents(_bedroom())
    a = solve_layout(g, cfg(seed=1))
    b = solve_layout(g, cfg(seed=2))
    assert a.placements["rug_1"] != b.placements["rug_1"]


def test_document_excludes_wall_clock():
    g = compute_cluster_extents(_bedroom())
    layout = solve_layout(g, cfg(seed=3))
    doc = layout.to_document()
    assert layout.duration_s > 0
    assert "duration" not in json.dumps(doc)
    json.dumps(doc)  # serializable as-is


def test_unsat_oversized_object(room):
    g = graph_of(
        room,
        [obj("sofa_1", size=(5.0, 1.0, 0.8))],
        [edge("floor", "sofa_1", ON)],
    )
    layout = solve_layout(g, cfg(max_backtracks=5))
    assert layout.status == UNSAT


def test_backtrack_events_resume_one_level_up(room):
    # the chair can never fit to the table's left, whatever the table does
    g = graph_of(
        room,
        [obj("table_1", size=(1.0, 0.9, 0.75)), obj("chair_1", size=(2.8, 0.5, 0.9))],
        [edge("floor", "table_1", ON), edge("table_1", "chair_1", LEFT_OF, NOT_ADJACENT)],
    )
    layout = solve_layout(g, cfg(max_backtracks=10, seed=5))
    assert layout.status == UNSAT
    assert layout.backtracks == 11
    assert layout.events
    for event in layout.events:
        assert event.failed_node == "chair_1"
        assert event.failed_depth == 2
        assert event.resumed_depth == 1
    assert layout.failure_counts["chair_1"] == 11


def test_empty_graph_is_trivially_solved(room):
    layout = solve_layout(graph_of(room, [], []))
    assert layout.solved and layout.placements == {}


def test_verify_flags_corruption():
    g = compute_cluster_extents(_bedroom())
    layout = solve_layout(g, cfg(seed=11))
    assert layout.solved
    layout.placements["lamp_1"] = (0.1, 0.1, 0.2)  # off its nightstand
    assert any("lamp_1" in p for p in verify_layout(g, layout))


def test_verify_flags_out_of_room():
    g = graph_of(Room(4.0, 3.0, 2.4), [obj("bed_1")], [edge("floor", "bed_1", ON)])
    layout = solve_layout(g, cfg(seed=1))
    layout.placements["bed_1"] = (-1.0, 1.0, 0.25)
    assert any("outside room" in p for p in verify_layout(g, layout))


def _sat_instance():
    return graph_of(
        Room(4.0, 3.0, 2.4),
        [
            obj("desk_1", size=(1.2, 0.6, 0.8)),
            obj("chair_1", size=(0.4, 0.4, 0.9)),
            obj("lamp_1", size=(0.2, 0.2, 0.4)),
        ],
        [
            edge("wall_west", "desk_1", "in_the_corner", ADJACENT),
            edge("desk_1", "chair_1", RIGHT_OF, ADJACENT),
            edge("desk_1", "lamp_1", ON, ADJACENT),
        ],
    )


def _unsat_instance():
    # above-edge with no headroom: parent top 2.0, child needs 0.6 more
    return graph_of(
        Room(4.0, 3.0, 2.4),
        [obj("wardrobe_1", size=(1.0, 0.6, 2.0)), obj("box_1", size=(0.4, 0.4, 0.6))],
        [
            edge("floor", "wardrobe_1", ON),
            edge("wardrobe_1", "box_1", ABOVE, NOT_ADJACENT),
        ],
    )


def test_annotated_solve_keeps_subtrees_inside_cluster_boxes():
    g = compute_cluster_extents(_bedroom())
    layout = solve_layout(g, cfg(seed=11))
    assert layout.solved

    def descendants(nid):
        for e in g.children_of(nid):
            yield e.child
            yield from descendants(e.child)

    for node in g.nodes:
        cs = node.cluster_extents
        px, py, _ = layout.placements[node.id]
        for did in descendants(node.id):
            dhx, dhy, _ = g.get_node(did).world_half_extents()
            dx, dy, _ = layout.placements[did]
            assert dx - dhx >= px - cs[0] - 1e-9
            assert dx + dhx <= px + cs[1] + 1e-9
            assert dy - dhy >= py - cs[2] - 1e-9
            assert dy + dhy <= py + cs[3] + 1e-9


def test_oracle_agrees_on_sat_instance():
    g = _sat_instance()
    config = cfg(seed=9, samples_per_object=60, max_backtracks=400)
    assert oracle_solve(g, config)
    layout = solve_layout(compute_cluster_extents(g), config)
    assert layout.status == SOLVED
    assert verify_layout(compute_cluster_extents(g), layout) == []


def test_oracle_agrees_on_unsat_instance():
    g = _unsat_instance()
    config = cfg(seed=9, samples_per_object=60, max_backtracks=50)
    assert not oracle_solve(g, config)
    assert solve_layout(g, config).status == UNSAT
