import pytest

from relhyp.config import SAMPLE_DEFAULTS, ConfigError, derive_seed, load_config, parse_config

BASE = """
seed: 1
domain:
  group: groups/f2_rel_a.yaml
  radius: 5
  depth: 3
  rho: 2
  tau: 1.5
"""


def parse(configs, text):
    return parse_config(text, base=configs)


def test_shipped_configs_load(configs):
    for p in sorted(configs.glob("*.yaml")):
        cfg = load_config(p)
        assert cfg.domain.radius >= 1


def test_defaults(configs):
    cfg = parse(configs, BASE)
    assert cfg.samples == SAMPLE_DEFAULTS and cfg.shadow_radius is None
    assert cfg.codomain is None and cfg.codomain_atlas == "induced" and cfg.radius_policy == "fail"


@pytest.mark.parametrize("extra, path", [
    ("bogus: 1\n", "bogus"),
    ("samples: {widgets: 3}\n", "samples.widgets"),
    ("samples: {qi: 0}\n", "samples.qi"),
    ("delta: {mode: psychic}\n", "delta.mode"),
    ("shadow_radius: -2\n", "shadow_radius"),
    ("larger_radius: 3\n", "larger_radius"),
    ("larger_codomain_radius: 8\n", "larger_codomain_radius"),
    ("codomain_atlas: shared\n", "codomain_atlas"),
])
def test_field_paths(configs, extra, path):
    with pytest.raises(ConfigError) as e:
        parse(configs, BASE + extra)
    assert e.value.path == path


@pytest.mark.parametrize("old, new, path", [
    ("tau: 1.5", "tau: 1.25", "domain.tau"),
    ("depth: 3", "depth: 0", "domain.depth"),
    ("radius: 5", "radius: five", "domain.radius"),
    ("groups/f2_rel_a.yaml", "groups/missing.yaml", "domain.group"),
])
def test_space_errors(configs, old, new, path):
    with pytest.raises(ConfigError) as e:
        parse(configs, BASE.replace(old, new))
    assert e.value.path == path


def test_missing_seed(configs):
    with pytest.raises(ConfigError) as e:
        parse(configs, BASE.replace("seed: 1\n", ""))
    assert e.value.path == ".seed"


def test_derive_seed():
    assert derive_seed(1, "a", "b") == derive_seed(1, "a", "b")
    assert derive_seed(1, "a", "b") != derive_seed(1, "ab")
    assert derive_seed(1, "a") != derive_seed(2, "a")
