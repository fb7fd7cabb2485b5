"""Bundled example network G7 and its leader configurations."""

from __future__ import annotations

from importlib import resources

from .graph import (
    DirectedNetwork,
    LeaderProfile,
    LeaderSchedule,
    parse_leaders,
    parse_network,
    parse_schedule,
)

DATA = resources.files("fsnkit") / "data"

G7_EDGES_PATH = DATA / "g7.edges"
G7_LEADERS_PATH = DATA / "g7.leaders"
SWITCHING_SCHEDULE_PATH = DATA / "switching.schedule"


def g7() -> DirectedNetwork:
    return parse_network(G7_EDGES_PATH.read_text(), source="g7.edges")


def g7_leaders() -> LeaderProfile:
    """Leaders {1, 5}, delta = 1, u_0 = 0.1."""
    return parse_leaders(G7_LEADERS_PATH.read_text(), 7, source="g7.leaders")


def switch_scenario() -> LeaderSchedule:
    """Leaders {1} on [0,50] (u=0.1), {6} on [50,100] (u=0.9), {2,7} on [100,150] (u=0.1)."""
    return parse_schedule(SWITCHING_SCHEDULE_PATH.read_text(), 7, source="switching.schedule")
