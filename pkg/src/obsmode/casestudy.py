"""Generator for the 5x5 grid robot case study and the bundled example models.

The robot starts in a known cell and must reach a known target cell without
entering a dangerous cell.  The dangerous cells are laid out in one of three
ways, and the environment picks one of them in the first step.  Two sensors
of different price reveal the dangerous cells around the robot.

Everything that is a transcription choice lives in the table below; change it
there and nowhere else.
"""

from __future__ import annotations

import json
from importlib import resources

from .model import NtsModel, validate_model

SIZE = 5
START = (1, 1)
TARGET = (5, 1)

# Dangerous (row, column) cells per layout; rows grow southwards.  The cells
# next to the narrated routes are pinned by the sensor readings described for
# them; the remaining ones were chosen so that the reachable product has 208
# states and 667 enabled (state, action) pairs.
DANGEROUS = {
    1: frozenset({(2, 1), (3, 3), (3, 4), (4, 1), (5, 3), (5, 5)}),
    2: frozenset({(1, 3), (1, 5), (3, 1), (3, 3), (5, 2)}),
    3: frozenset({(1, 3), (3, 1), (3, 2), (3, 4)}),
}

# Transcription choices:
# - a compass move that would leave the grid is disabled, not a self-loop
# - dangerous and target cells keep their ordinary moves; the formula is
#   decided on entering them, so what follows does not matter to it
# - det is reported iff at least one dangerous cell is in the sensed area
TARGET_SELF_LOOPS = False

MOVES = {"N": (-1, 0), "S": (1, 0), "E": (0, 1), "W": (0, -1)}
NEIGHBOURS = {"N": (-1, 0), "S": (1, 0), "E": (0, 1), "W": (0, -1),
              "NW": (-1, -1), "NE": (-1, 1), "SW": (1, -1), "SE": (1, 1)}
# quadrant sensor: a dangerous neighbour lights up every quadrant it touches
QUADRANTS = {"N": ("NW", "NE"), "S": ("SW", "SE"), "E": ("NE", "SE"),
             "W": ("NW", "SW"), "NW": ("NW",), "NE": ("NE",), "SW": ("SW",),
             "SE": ("SE",)}
OBSERVATIONS = ("N", "S", "W", "E", "NW", "NE", "SW", "SE", "det")
MODE_COSTS = (("m1", "0"), ("m2", "1"), ("m3", "2"))


def cell_state(grid, row, col) -> str:
    return f"s{grid}{row}{col}"


def exact_reading(dangerous, row, col) -> list:
    """What the exact-neighbourhood sensor reports at (row, col)."""
    hits = [d for d, (dr, dc) in NEIGHBOURS.items() if (row + dr, col + dc) in dangerous]
    return sorted(hits + ["det"]) if hits else []


def quadrant_reading(dangerous, row, col) -> list:
    """What the quadrant sensor reports at (row, col)."""
    quads = set()
    for d in exact_reading(dangerous, row, col):
        quads.update(QUADRANTS.get(d, ()))
    return sorted(quads | {"det"}) if quads else []


def grid_raw(dangerous=None) -> dict:
    """The case study as a raw model mapping (see :func:`validate_model`)."""
    dangerous = DANGEROUS if dangerous is None else dangerous
    grids = sorted(dangerous)
    states = ["sinit"] + [cell_state(g, r, c) for g in grids
                          for r in range(1, SIZE + 1) for c in range(1, SIZE + 1)]
    transitions = [{"from": "sinit", "action": "a",
                    "to": [cell_state(g, *START) for g in grids]}]
    labels, quad_obs, exact_obs = {}, {}, {}
    for g in grids:
        for r in range(1, SIZE + 1):
            for c in range(1, SIZE + 1):
                s = cell_state(g, r, c)
                for move, (dr, dc) in MOVES.items():
                    if TARGET_SELF_LOOPS and (r, c) == TARGET:
                        transitions.append({"from": s, "action": move, "to": [s]})
                        continue
                    if 1 <= r + dr <= SIZE and 1 <= c + dc <= SIZE:
                        transitions.append({"from": s, "action": move,
                                            "to": [cell_state(g, r + dr, c + dc)]})
                props = []
                if (r, c) in dangerous[g]:
                    props.append("dang")
                if (r, c) == TARGET:
                    props.append("target")
                if props:
                    labels[s] = props
                q = quadrant_reading(dangerous[g], r, c)
                e = exact_reading(dangerous[g], r, c)
                if q:
                    quad_obs[s] = q
                if e:
                    exact_obs[s] = e
    obs = ({}, quad_obs, exact_obs)
    return {
        "states": states,
        "actions": ["a", "N", "S", "E", "W"],
        "transitions": transitions,
        "init": "sinit",
        "ap": ["dang", "target"],
        "labels": labels,
        "observations": list(OBSERVATIONS),
        "modes": [{"name": name, "cost": cost, "obs": o}
                  for (name, cost), o in zip(MODE_COSTS, obs)],
        "init_mode": "m1",
    }


def generate_grid_casestudy(dangerous=None) -> NtsModel:
    return validate_model(grid_raw(dangerous))


GRID_FORMULA = "(! dang) U target"
RUNNING_FORMULA = "F star"


def bundled_raw(name) -> dict:
    """Raw JSON of a bundled model, ``running`` or ``grid``.

    ``data/grid.json`` is the output of :func:`generate_grid_casestudy`, kept
    for use without this package.
    """
    text = resources.files("obsmode").joinpath("data", f"{name}.json").read_text()
    return json.loads(text)


def running_example() -> NtsModel:
    return validate_model(bundled_raw("running"))


def grid_casestudy() -> NtsModel:
    return validate_model(bundled_raw("grid"))
