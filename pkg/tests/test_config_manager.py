"""
Tests for configuration management.
"""

import json

from conftest import PROJECT_ROOT
from mac_policy import config_manager
from mac_policy.chinese_wall import Collection, CompileOptions, TopGrade
from mac_policy.config_manager import ConfigManager, get_config_manager, initialize_config


def test_repository_settings():
    config = ConfigManager(str(PROJECT_ROOT))
    assert config.settings_file.exists()
    assert config.get_setting("chinese_wall", "grade_step") == 10
    assert config.get_setting("output", "default_format") == "text"
    assert config.fixtures_dir == PROJECT_ROOT / "fixtures"


def test_missing_settings_fall_back_to_defaults(tmp_path):
    config = ConfigManager(str(tmp_path))
    assert config.get_setting("chinese_wall", "collection") == "dominated"
    assert not (tmp_path / "config").exists()


def test_settings_override_and_unknown_keys(tmp_path):
    (tmp_path / "config").mkdir()
    (tmp_path / "config" / "engine_settings.json").write_text(json.dumps({
        "chinese_wall": {"grade_step": 100, "shiny": True},
        "mystery": {"x": 1},
    }))
    config = ConfigManager(str(tmp_path))
    assert config.get_setting("chinese_wall", "grade_step") == 100
    assert "shiny" not in config.chinese_wall_settings()
    assert "mystery" not in config.settings


def test_broken_settings_file(tmp_path):
    (tmp_path / "config").mkdir()
    (tmp_path / "config" / "engine_settings.json").write_text("{not json")
    assert ConfigManager(str(tmp_path)).get_setting("chinese_wall", "top_grade") == "numeric"


def test_home_variable(tmp_path, monkeypatch):
    monkeypatch.setenv("MAC_POLICY_HOME", str(tmp_path))
    assert ConfigManager().project_root == tmp_path


def test_resolve_fixture(tmp_path):
    config = ConfigManager(str(PROJECT_ROOT))
    assert config.resolve_fixture("biba-org") == PROJECT_ROOT / "fixtures" / "biba-org.mac"
    assert config.resolve_fixture("trusted-entity.mac") == PROJECT_ROOT / "fixtures" / "trusted-entity.mac"
    own = tmp_path / "world.mac"
    own.write_text("")
    assert config.resolve_fixture(str(own)) == own
    assert set(config.list_fixtures()) >= {"biba-org", "mls-org", "compart-org", "trusted-entity", "prohibitions"}


def test_compile_options_follow_settings(tmp_path):
    (tmp_path / "config").mkdir()
    (tmp_path / "config" / "engine_settings.json").write_text(json.dumps({
        "chinese_wall": {"collection": "compatible", "top_grade": "high"},
    }))
    initialize_config(str(tmp_path))
    options = CompileOptions.from_settings()
    assert options.collection is Collection.COMPATIBLE
    assert options.top_grade is TopGrade.HIGH
    assert options.grade_step == 10


def test_global_instance():
    config_manager._config_manager = None
    first = get_config_manager()
    assert get_config_manager() is first
    replaced = initialize_config(str(PROJECT_ROOT))
    assert get_config_manager() is replaced
