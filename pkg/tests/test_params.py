"""Scenario presets, validation bounds, and config-file round trips."""

import pytest

from dolenet.params import (SCENARIOS, ConfigError, ScenarioConfig,
                            read_config, scenario_config, write_config)

TABLE_3 = {
    "baseline": (0.52, 360),
    "high": (0.69, 360),
    "low": (0.35, 360),
    "long": (0.52, 540),
    "short": (0.52, 180),
    "high-long": (0.69, 540),
    "high-short": (0.69, 180),
    "low-long": (0.35, 540),
    "low-short": (0.35, 180),
}


def test_nine_scenarios_match_published_grid():
    assert SCENARIOS == TABLE_3
    for name, (dg, eps) in TABLE_3.items():
        cfg = scenario_config(name)
        assert (cfg.delta_g, cfg.epsilon) == (dg, eps)


def test_scenario_names_case_insensitive():
    assert scenario_config("High-Short").epsilon == 180


def test_unknown_scenario_lists_valid_names():
    with pytest.raises(ConfigError, match="baseline"):
        scenario_config("austerity")


@pytest.mark.parametrize("field,value,fragment", [
    ("delta_g", 1.5, r"\(0, 1\)"),
    ("delta_g", 0.0, r"\(0, 1\)"),
    ("epsilon", 0, "positive"),
    ("expiry_mode", "lunar", "expiry_mode"),
    ("n_households", 499, "divisible"),
    ("burn_in", 2000, "burn_in"),
    ("alpha_1", 1.0, "alpha_1"),
    ("mean_degree", 500, "mean_degree"),
    ("homophily_se", 1.0, "below"),
    ("homophily_c", 2.0, "below"),
    ("shirk_max", 1.5, "shirk_max"),
    ("quit_wage_drop", 1.0, "quit_wage_drop"),
])
def test_validation_bounds(field, value, fragment):
    cfg = ScenarioConfig(**{field: value})
    with pytest.raises(ConfigError, match=fragment):
        cfg.validate()


def test_defaults_validate():
    ScenarioConfig().validate()


def test_config_file_roundtrip(tmp_path):
    cfg = scenario_config("high-long", master_seed=99, steps=222,
                          sfc_strict=False)
    path = tmp_path / "scenario.cfg"
    write_config(cfg, path)
    loaded = read_config(path)
    assert loaded == cfg


def test_config_file_comments_and_unknown_keys(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("# a comment\nmaster_seed = 7  # trailing\n\n")
    assert read_config(path).master_seed == 7
    path.write_text("not_a_key = 3\n")
    with pytest.raises(ConfigError, match="unknown config key"):
        read_config(path)


def test_config_hash_distinguishes_scenarios():
    hashes = {scenario_config(n).config_hash() for n in SCENARIOS}
    assert len(hashes) == len(SCENARIOS)
    assert scenario_config("baseline").config_hash() == \
        scenario_config("baseline").config_hash()
