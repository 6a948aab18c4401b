import numpy as np
import pytest

from spde_damping.errors import FormatError
from spde_damping.io import MAGIC, read_field, read_field_csv, write_field, write_field_csv
from spde_damping.simulate import FieldSample


@pytest.fixture
def fld():
    rng = np.random.default_rng(3)
    return FieldSample(np.linspace(0, 1, 5), np.array([0.1, 0.5, 0.9]), np.array([0.2, 0.8]), rng.standard_normal((5, 3, 2)))


def test_binary_round_trip(tmp_path, fld):
    p = tmp_path / "f.spde"
    write_field(fld, p)
    data = p.read_bytes()
    assert data[:8] == MAGIC
    assert len(data) == 32 + 8 * (5 + 3 + 2 + 30)
    back = read_field(p)
    for a in ("times", "ys", "zs", "values"):
        np.testing.assert_array_equal(getattr(back, a), getattr(fld, a))


def test_binary_rejects_corruption(tmp_path, fld):
    p = tmp_path / "f.spde"
    write_field(fld, p)
    data = p.read_bytes()
    (tmp_path / "bad_magic").write_bytes(b"XXXXXXXX" + data[8:])
    (tmp_path / "short").write_bytes(data[:-8])
    (tmp_path / "tiny").write_bytes(data[:10])
    for name in ("bad_magic", "short", "tiny"):
        with pytest.raises(FormatError):
            read_field(tmp_path / name)


def test_csv_round_trip(tmp_path, fld):
    p = tmp_path / "f.csv"
    write_field_csv(fld, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "t,y,z,value" and len(lines) == 31
    back = read_field_csv(p)
    np.testing.assert_array_equal(back.values, fld.values)


def test_csv_incomplete_grid(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("t,y,z,value\n0,0.1,0.1,1\n0,0.1,0.2,1\n0,0.2,0.1,1\n")
    with pytest.raises(FormatError):
        read_field_csv(p)
