from pathlib import Path

import pytest
import yaml
from pydantic import ValidationError

from cocycleforge.config import THREADS_ENV, Config, config_hash, expand_dotted, load_config

REPO_CONFIG = Path(__file__).resolve().parent.parent / "config.yaml"


def _write(temp_dir, data, name="config.yaml"):
    path = Path(temp_dir) / name
    with open(path, "w") as f:
        yaml.safe_dump(data, f, allow_unicode=True)
    return str(path)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    monkeypatch.delenv("COCYCLE_FORGE_WEBHOOK_URL", raising=False)


class TestConfig:
    """Test configuration defaults and validation."""

    def test_config_default_values(self):
        config = Config()

        assert config.timezone == "UTC"
        assert config.base.kind == "circle"
        assert config.cocycle.psi.kind == "constant_rotation"
        assert config.experiment.lambdas == [0.9, 0.99, 0.999]
        assert config.experiment.n_schedule == [100, 1000, 10000, 100000]
        assert config.experiment.attractor_relative_floor == 1e-4
        assert config.output.float_format == "%.17e"
        assert config.alerts.enabled is False

    def test_config_custom_values(self):
        config = Config(seed=3, base={"kind": "torus", "dim": 2, "alpha": [0.1, 0.2]})

        assert config.seed == 3
        assert config.base.alpha == [0.1, 0.2]

    @pytest.mark.parametrize("lambdas", [[0.9, 0.5], [0.5, 1.0], [0.0, 0.5], []])
    def test_invalid_lambda_schedule(self, lambdas):
        with pytest.raises(ValidationError):
            Config(experiment={"lambdas": lambdas})

    @pytest.mark.parametrize("schedule", [[10, 10], [0, 5], [100, 10]])
    def test_invalid_n_schedule(self, schedule):
        with pytest.raises(ValidationError):
            Config(experiment={"n_schedule": schedule})

    @pytest.mark.parametrize("floor", [0.0, -1e-4])
    def test_attractor_relative_floor_positive(self, floor):
        with pytest.raises(ValidationError):
            Config(experiment={"attractor_relative_floor": floor})

    def test_unknown_kinds(self):
        with pytest.raises(ValidationError, match="Unknown Ψ kind"):
            Config(cocycle={"psi": {"kind": "shear"}})
        with pytest.raises(ValidationError, match="Unknown ρ kind"):
            Config(cocycle={"rho": {"kind": "mystery"}})
        with pytest.raises(ValidationError, match="Unknown averaging sequence"):
            Config(experiment={"sequence": "harmonic"})

    def test_registry_name_allowed_with_registry_file(self):
        config = Config(registry_file="cocycles.yaml", cocycle={"rho": {"kind": "mystery"}})
        assert config.cocycle.rho.kind == "mystery"

    def test_cyclic_random_needs_cyclic_base(self):
        with pytest.raises(ValidationError, match="cyclic base"):
            Config(cocycle={"psi": {"kind": "cyclic_random"}})
        config = Config(base={"kind": "cyclic", "period": 5},
                        cocycle={"psi": {"kind": "cyclic_random"}, "rho": {"kind": "cyclic_random"}})
        assert config.base.period == 5

    def test_torus_alpha_length(self):
        with pytest.raises(ValidationError, match="2 components"):
            Config(base={"kind": "torus", "dim": 2, "alpha": [0.1]})

    def test_circle_rejects_list_alpha(self):
        with pytest.raises(ValidationError, match="single rotation number"):
            Config(base={"kind": "circle", "alpha": [0.1, 0.2]})

    def test_threads_positive(self):
        with pytest.raises(ValidationError):
            Config(threads=0)


class TestExpandDotted:
    def test_dotted_keys(self):
        assert expand_dotted({"base.alpha": 0.5, "seed": 1}) == {"base": {"alpha": 0.5}, "seed": 1}

    def test_dotted_and_nested_merge(self):
        data = {"experiment": {"kind": "sweep"}, "experiment.eps": 1e-8}
        assert expand_dotted(data) == {"experiment": {"kind": "sweep", "eps": 1e-8}}

    def test_nested_dotted(self):
        assert expand_dotted({"cocycle": {"psi.beta": 2.0}}) == {"cocycle": {"psi": {"beta": 2.0}}}

    def test_conflicting_scalar(self):
        with pytest.raises(ValueError, match="conflicts"):
            expand_dotted({"seed": 1, "seed.value": 2})


class TestLoadConfig:
    """Test loading configuration from YAML files."""

    def test_load_repo_config(self):
        config = load_config(str(REPO_CONFIG))

        assert config.seed == 20240601
        assert config.cocycle.dim == 2
        assert len(config.cocycle.rho.fourier) == 5

    def test_load_config_valid_yaml(self, temp_dir):
        path = _write(temp_dir, {"seed": 11, "experiment": {"kind": "drift", "n_schedule": [10, 100]}})

        config = load_config(path)

        assert config.seed == 11
        assert config.experiment.kind == "drift"
        assert config.experiment.n_schedule == [10, 100]

    def test_load_dotted_yaml(self, temp_dir):
        path = _write(temp_dir, {"base.kind": "cyclic", "base.period": 12, "experiment.kind": "oracle-check"})

        config = load_config(path)

        assert config.base.kind == "cyclic"
        assert config.base.period == 12

    def test_load_empty_file(self, temp_dir):
        path = Path(temp_dir) / "empty.yaml"
        path.write_text("")
        assert load_config(str(path)) == Config()

    def test_load_non_mapping(self, temp_dir):
        path = Path(temp_dir) / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError, match="mapping"):
            load_config(str(path))

    def test_load_config_file_not_found(self):
        with pytest.raises(FileNotFoundError):
            load_config("nonexistent.yaml")

    def test_threads_env_override(self, temp_dir, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "6")
        path = _write(temp_dir, {"threads": 2})
        assert load_config(path).threads == 6

    def test_webhook_url_from_env(self, temp_dir, monkeypatch):
        monkeypatch.setenv("TEST_WEBHOOK_URL", "https://webhook.example.com")
        path = _write(temp_dir, {"alerts": {"enabled": True, "webhook_url_env": "TEST_WEBHOOK_URL"}})

        config = load_config(path)

        assert config.alerts.enabled is True
        assert config.alerts.webhook_url == "https://webhook.example.com"

    def test_webhook_url_in_file_is_ignored(self, temp_dir):
        path = _write(temp_dir, {"alerts": {"webhook_url": "https://leaked.example.com"}})
        assert load_config(path).alerts.webhook_url == ""

    def test_invalid_value(self, temp_dir):
        path = _write(temp_dir, {"grid": {"size": 0}})
        with pytest.raises(ValidationError):
            load_config(path)


class TestConfigHash:
    def test_stable(self):
        assert config_hash(Config(seed=1)) == config_hash(Config(seed=1))
        assert len(config_hash(Config())) == 64

    def test_sensitive_to_experiment(self):
        assert config_hash(Config(seed=1)) != config_hash(Config(seed=2))
        assert config_hash(Config()) != config_hash(Config(experiment={"eps": 1e-8}))

    def test_ignores_threads_and_webhook_url(self):
        base = config_hash(Config())
        assert config_hash(Config(threads=8)) == base
        assert config_hash(Config(alerts={"webhook_url": "https://secret.example.com"})) == base
