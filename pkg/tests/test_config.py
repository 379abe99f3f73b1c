import pytest

from tlchain.config import RunConfig, env_layer, file_layer, load_config
from tlchain.utils.chain import Boundary
from tlchain.utils.errors import ConfigError
from tlchain.utils.qnum import Family, Sign
from tlchain.utils.transmission import DEFAULT_T_SAMPLES


def test_defaults():
    config = load_config({}, environ={})
    assert config == RunConfig()
    assert config.family is Family.ORTHOGONAL
    assert config.n == 3
    assert config.q == 1.0
    assert config.sign is Sign.PLUS
    assert config.t_samples == DEFAULT_T_SAMPLES
    assert config.order == 5


def test_precedence_flags_over_file_over_env(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("q=2.0\nTLCHAIN_N=4\nchain-length=4\n")
    environ = {"TLCHAIN_Q": "3.0", "TLCHAIN_N": "5", "TLCHAIN_SIGN": "minus"}

    config = load_config({"q": 1.5, "n": None}, str(path), environ)
    assert config.q == 1.5
    assert config.n == 4
    assert config.chain_length == 4
    assert config.sign is Sign.MINUS


def test_env_layer_parses_lists_and_complex():
    layer = env_layer({
        "TLCHAIN_T_SAMPLES": "0.1, 0.2;0.3",
        "TLCHAIN_C2": "0.8i",
        "TLCHAIN_INITIAL": "3 1 1",
        "TLCHAIN_BOUNDARY": "Closed",
        "TLCHAIN_LOG_SPACING": "no",
        "TLCHAIN_COMMAND": "evolve",
        "UNRELATED": "1",
    })
    assert layer == {
        "t_samples": (0.1, 0.2, 0.3),
        "c2": 0.8j,
        "initial": (3, 1, 1),
        "boundary": Boundary.CLOSED,
        "log_spacing": False,
    }


def test_file_layer_missing_and_unknown_key(tmp_path):
    assert file_layer(None) == {}
    with pytest.raises(ConfigError):
        file_layer(str(tmp_path / "absent.env"))

    path = tmp_path / "bad.env"
    path.write_text("colour=red\n")
    with pytest.raises(ConfigError, match="colour"):
        file_layer(str(path))


@pytest.mark.parametrize("flags", [
    {"q": -1.0},
    {"q": float("inf")},
    {"family": "su"},
    {"family": "sp", "n": 3},
    {"n": 2.5},
    {"format": "xml"},
    {"method": "rk4"},
    {"chain_length": 1},
    {"order": -1},
    {"theta_pairs": 0},
    {"q_min": 5.0, "q_max": 1.0},
    {"points": 1},
    {"log_level": "chatty"},
    {"n": 8, "chain_length": 12},
])
def test_invalid_values_rejected(flags):
    with pytest.raises(ConfigError):
        load_config(flags, environ={})


def test_invalid_env_value_names_layer():
    with pytest.raises(ConfigError, match="окружение"):
        load_config({}, environ={"TLCHAIN_Q": "abc"})


def test_initial_labels_checked_against_chain():
    with pytest.raises(ConfigError, match="initial"):
        load_config({"initial": "3,1", "chain_length": 3}, environ={})
    with pytest.raises(ConfigError, match="initial"):
        load_config({"initial": "4,1,1"}, environ={})
    config = load_config({"initial": "3,1,1"}, environ={})
    assert config.initial == (3, 1, 1)


def test_chain_from_config():
    config = load_config({"family": "sp", "n": 4, "q": 1.2, "chain_length": 3, "boundary": "closed"}, environ={})
    chain = config.chain()
    assert chain.spec.family is Family.SYMPLECTIC
    assert chain.closed
    assert chain.dim == 64
    assert config.chain(4).length == 4


def test_exact_method_checked_against_dense_cap():
    flags = {"command": "evolve", "method": "exact", "chain_length": 8}
    with pytest.raises(ConfigError, match="DENSE_CAP"):
        load_config(flags, environ={})
    with pytest.raises(ConfigError, match="DENSE_CAP"):
        load_config({"command": "evolve", "method": "exact", "chain_length": 4}, environ={"TLCHAIN_DENSE_CAP": "80"})

    assert load_config({**flags, "method": "series"}, environ={}).chain_length == 8
    assert load_config(flags, environ={"TLCHAIN_DENSE_CAP": "7000"}).dense_cap == 7000


def test_operator_length_needs_operator_and_small_chain():
    with pytest.raises(ConfigError, match="--operator"):
        load_config({"operator_length": 3}, environ={})
    with pytest.raises(ConfigError, match="r=5"):
        load_config({"operator": True, "operator_length": 5}, environ={})
    assert load_config({"operator": True, "operator_length": 4}, environ={}).operator_length == 4
