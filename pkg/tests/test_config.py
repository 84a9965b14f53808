import pytest

from config import PRESETS, SNAPSHOT_NAME, build, read_config_file, resolve, to_flat, write_snapshot
from datagen import DataKind
from divergence import LogBackend
from errors import ConfigError
from trainer import TrainMode


def write(tmp_path, text, name="run.env"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestBuild:
    def test_defaults(self):
        run = build({})
        assert run.train.mu_u == 1.0
        assert run.train.gamma_u == 3e-3
        assert run.train.mce.log_backend is LogBackend.TAYLOR
        assert run.data.kind is DataKind.GAUSSIAN_BLOBS

    def test_typed_values(self):
        run = build({
            "tau": "0.8",
            "cpl_enabled": "yes",
            "hidden": "16, 8",
            "mode": "Supervised",
            "log_backend": "taylor5",
            "ridge_lambda": "1e-3",
            "data_kind": "rings",
            "data_n_test": "90",
        })
        assert run.train.tau == 0.8
        assert run.train.cpl_enabled is True
        assert run.train.hidden == (16, 8)
        assert run.train.mode is TrainMode.SUPERVISED
        assert run.train.mce.taylor_order == 5
        assert run.train.mce.ridge_lambda == 1e-3
        assert run.data.kind is DataKind.CONCENTRIC_RINGS
        assert run.data.n_test == 90

    @pytest.mark.parametrize(
        "values",
        [
            {"no_such_key": "1"},
            {"tau": "abc"},
            {"cpl_enabled": "maybe"},
            {"log_backend": "cholesky"},
            {"mode": "bogus"},
            {"data_kind": "moons"},
            {"tau": "2"},
        ],
    )
    def test_rejects(self, values):
        with pytest.raises(ConfigError):
            build(values)


class TestResolve:
    def test_precedence(self, tmp_path):
        path = write(tmp_path, "# run file\nmu_u=0.5\ntau=0.8\n")
        run = resolve("paper-literal", path, {"mu_u": 0.25, "total_steps": None})
        assert run.train.mu_u == 0.25
        assert run.train.tau == 0.8
        assert run.train.gamma_u == 1.0
        assert run.train.total_steps == 5000

    def test_backend_flag_over_snapshot_sets_taylor_order(self, tmp_path):
        path = str(tmp_path / SNAPSHOT_NAME)
        write_snapshot(build({}), path)
        run = resolve("default", path, {"log_backend": "taylor5"})
        assert run.train.mce.log_backend is LogBackend.TAYLOR
        assert run.train.mce.taylor_order == 5
        assert run.train.mce.spelling == "taylor5"

    def test_backend_flag_over_file_taylor_order(self, tmp_path):
        path = write(tmp_path, "taylor_order=5\n")
        assert resolve("default", path).train.mce.taylor_order == 5
        assert resolve("default", path, {"log_backend": "taylor3"}).train.mce.taylor_order == 3

    def test_taylor_order_flag_over_file_backend(self, tmp_path):
        path = write(tmp_path, "log_backend=taylor5\n")
        run = resolve("default", path, {"taylor_order": "2"})
        assert run.train.mce.spelling == "taylor2"

    def test_spelling_wins_within_one_layer(self):
        assert build({"log_backend": "taylor5", "taylor_order": "3"}).train.mce.taylor_order == 5
        assert build({"log_backend": "principal", "taylor_order": "4"}).train.mce.taylor_order == 4

    def test_presets(self):
        assert resolve("pseudo-label").train.gamma_u == 0.0
        assert resolve("supervised-mce").train.mode is TrainMode.SUPERVISED
        assert resolve("supervised-mce").train.gamma_s == 0.1
        assert resolve("ce-baseline").train.gamma_s == 0.0
        assert resolve("ce-label-smoothing").train.label_smoothing == 0.1
        assert resolve("ce-label-smoothing").train.gamma_s == 0.0
        assert resolve("cpl").train.cpl_enabled
        assert resolve("default") == build({})
        for name in PRESETS:
            resolve(name)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            resolve("fixmatch")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(str(tmp_path / "absent.env"))

    def test_key_without_value(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(write(tmp_path, "tau\n"))

    def test_quoted_values(self, tmp_path):
        assert read_config_file(write(tmp_path, 'log_backend="principal"\n')) == {"log_backend": "principal"}


class TestSnapshot:
    def test_reload_is_identical(self, tmp_path):
        run = resolve("cpl", None, {
            "log_backend": "elementwise",
            "taylor_order": "4",
            "hidden": "16,8",
            "lr": "0.1",
            "data_kind": "rings",
            "data_class_separation": "2.5",
        })
        path = str(tmp_path / SNAPSHOT_NAME)
        write_snapshot(run, path, "cpl")
        assert resolve("default", path) == run

    def test_snapshot_lists_every_key(self, tmp_path):
        run = build({})
        path = str(tmp_path / SNAPSHOT_NAME)
        write_snapshot(run, path)
        assert read_config_file(path) == to_flat(run)

    def test_with_seed(self):
        run = build({}).with_seed(9)
        assert run.seed == 9
        assert run.data.seed == 9
