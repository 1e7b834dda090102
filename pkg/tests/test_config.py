import json

import numpy as np
import pytest

from unionroa import bench, config
from unionroa.vsiter import ConfigError


@pytest.mark.parametrize("name", bench.names())
def test_preset_roundtrip(name):
    rc = config.preset_config(name)
    again = config.loads(rc.dumps())
    assert again == rc
    assert again.dumps() == rc.dumps()
    assert len(rc.rounds) == len(bench.get(name).rounds)


def test_minimal_uses_preset_defaults():
    rc = config.from_dict({"version": 1, "system": "vdp"})
    assert rc.system.name == "vdp" and rc.iteration.deg_V == 6
    assert np.array_equal(rc.box, bench.get("vdp").box) and rc.seed == 0


def test_inline_system():
    rc = config.from_dict({
        "version": 1,
        "system": {"name": "mine", "f": ["-x1 + x2^2", "-x2"]},
        "rounds": [{"shapes": [{"center_mode": "origin", "N": [[1, 0], [0, 1]]}]}, {"shapes": []}],
        "iteration": {"max_iters": 5, "deg_s0": [2, 4]},
        "seed": 7,
    })
    assert rc.system.to_strings() == ["x2^2 - x1", "-x2"]
    assert rc.rounds[1].shapes == [] and rc.iteration.max_iters == 5 and rc.seed == 7
    assert config.loads(rc.dumps()) == rc


def test_explicit_initial_v():
    rc = config.from_dict({
        "version": 1, "system": "vdp",
        "rounds": [{"shapes": [], "initial_V": {"polynomial": "x1^2 + x2^2"}}],
    })
    assert rc.rounds[0].initial_V.degree == 2
    assert config.loads(rc.dumps()) == rc


@pytest.mark.parametrize("doc,where", [
    ({"version": 2, "system": "vdp"}, "version"),
    ({"version": 1}, "system"),
    ({"version": 1, "system": "nope"}, "system"),
    ({"version": 1, "system": "vdp", "extra": 1}, "config"),
    ({"version": 1, "system": {"f": ["x1 +"]}, "rounds": [{"shapes": []}]}, "system.f"),
    ({"version": 1, "system": {"f": ["-x1", "-x2"]}}, "rounds"),
    ({"version": 1, "system": "vdp", "rounds": [{"shapes": [{"N": [[1]], "center_mode": "origin"}]}]},
     "rounds[0].shapes[0].N"),
    ({"version": 1, "system": "vdp", "rounds": [{"shapes": [{"N": [[1, 0], [0, 1]]}]}]}, "rounds[0].shapes[0]"),
    ({"version": 1, "system": "vdp", "iteration": {"deg_si": [0, 2]}}, "iteration"),
    ({"version": 1, "system": "vdp", "iteration": {"bogus": 1}}, "iteration"),
    ({"version": 1, "system": "vdp", "box": [[1, 0], [0, 1]]}, "box"),
    ({"version": 1, "system": "vdp", "seed": "x"}, "seed"),
])
def test_errors_carry_field_path(doc, where):
    with pytest.raises(ConfigError) as e:
        config.from_dict(doc)
    assert str(e.value).startswith(where + ":")


def test_degree_condition_message():
    with pytest.raises(ConfigError, match=r"iteration: degree condition"):
        config.from_dict({"version": 1, "system": "vdp", "iteration": {"deg_si": [0, 2]}})


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        config.load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        config.load(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"version": 1, "system": "ex2"}))
    assert config.load(good).system.name == "ex2"
