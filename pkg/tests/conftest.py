from pathlib import Path

import pytest

from relhyp.cusped import build_cusped_ball
from relhyp.groups import free_group, load_group_spec

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"


@pytest.fixture(scope="session")
def configs():
    return CONFIGS


@pytest.fixture(scope="session")
def f2():
    return free_group("a", "b")


@pytest.fixture(scope="session")
def f2_rel_a():
    return load_group_spec(CONFIGS / "groups" / "f2_rel_a.yaml")


@pytest.fixture(scope="session")
def f2_rel_a_abgen():
    return load_group_spec(CONFIGS / "groups" / "f2_rel_a_abgen.yaml")


@pytest.fixture(scope="session")
def cusped_small(f2_rel_a):
    """F(a,b) rel <a>, R_cay 4, depth 3: small enough for exhaustive scans."""
    return build_cusped_ball(f2_rel_a, 4, 3)


@pytest.fixture(scope="session")
def x_atlas(f2_rel_a):
    """Atlas of the shipped F(a,b) rel <a> space: R_cay 7, depth 5, rho 3, tau 1.5."""
    from relhyp.boundary import Anchor, build_atlas
    from relhyp.groups import coset_of, reduce_word
    cb = build_cusped_ball(f2_rel_a, 7, 5)
    return build_atlas(cb, Anchor("parabolic", coset_of(f2_rel_a, reduce_word(f2_rel_a, ""), 0)), 3, 1.5)


@pytest.fixture(scope="session")
def generator_change(configs):
    """Context and forward result of the shipped generator-change run."""
    from relhyp import pipeline
    from relhyp.config import load_config
    ctx = pipeline.Context(load_config(configs / "f2_generator_change.yaml"), log=lambda msg: None)
    return ctx, pipeline.forward(ctx)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
