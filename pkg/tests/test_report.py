import json
import math

import numpy as np
import pytest

from fracdtn.report import dumps, plain, table_csv


def test_round_trip_and_format():
    rep = {"schema": 1, "z": 1 + 2j, "v": np.array([0.1, -0.0]), "flag": np.bool_(True), "none": None}
    text = dumps(rep)
    back = json.loads(text)
    assert back == {"schema": 1, "z": [1, 2], "v": [0.1, 0], "flag": True, "none": None}
    assert "0.10000000000000001" in text  # 17 significant digits
    assert dumps(rep) == text


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        dumps({"x": math.inf})
    with pytest.raises(ValueError):
        dumps({"x": [1.0, math.nan]})


def test_rejects_unknown_types():
    with pytest.raises(TypeError):
        plain(object())


def test_csv_splits_complex():
    text = table_csv(["t", "v", "ok"], [[0.5, 1 + 1j, True], [0.25, 2j, None]])
    assert text.splitlines() == ["t,v_re,v_im,ok", "0.5,1,1,true", "0.25,0,2,"]
