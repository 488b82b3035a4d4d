import pytest

from hockey_apm.shift_model import Player, Position, Shift


def make_roster():
    """Eight skaters (a-d home side, e-h away side) plus goalies ga/gh."""
    players = {}
    for pid, pos in [
        ("a", "C"), ("b", "LW"), ("c", "RW"), ("d", "D"),
        ("e", "C"), ("f", "LW"), ("g", "D"), ("h", "D"),
    ]:
        players[pid] = Player(pid, f"Skater {pid.upper()}", Position(pos))
    players["gh"] = Player("gh", "Goalie GH", Position.GOALIE)
    players["ga"] = Player("ga", "Goalie GA", Position.GOALIE)
    return players


def make_three_shifts():
    """Three 3v3 shifts with hand-checkable rosters, durations and goals.

    Shift 1: 40 s,  a,b,c+gh vs e,f,g+ga, goals 1-0
    Shift 2: 60 s,  a,b,d+gh vs e,f,h+ga, goals 0-1
    Shift 3: 100 s, a,c,d+gh vs e,g,h+ga, goals 2-1
    """
    return [
        Shift("g1", "s1", 40.0, 1, 0, ("a", "b", "c"), "gh", ("e", "f", "g"), "ga"),
        Shift("g1", "s1", 60.0, 0, 1, ("a", "b", "d"), "gh", ("e", "f", "h"), "ga"),
        Shift("g2", "s1", 100.0, 2, 1, ("a", "c", "d"), "gh", ("e", "g", "h"), "ga"),
    ]


@pytest.fixture
def roster():
    return make_roster()


@pytest.fixture
def three_shifts():
    return make_three_shifts()


@pytest.fixture(scope="session")
def small_league():
    """A small but fully-identified simulated league for pipeline tests."""
    from hockey_apm.simulate import SimConfig, generate

    config = SimConfig(
        n_teams=4,
        skaters_per_team=10,
        goalies_per_team=2,
        n_seasons=2,
        games_per_season=150,
        shifts_per_game=30,
        seed=2024,
    )
    shifts, truth, roster = generate(config)
    return config, shifts, truth, roster
