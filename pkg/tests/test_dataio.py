import json

import numpy as np
import pytest

from gpconfound.dataio import (
    config_digest,
    load_config,
    read_locations,
    read_long_data,
    standardize_per_replicate,
    write_long_data,
    write_manifest,
)
from gpconfound.errors import ConfigError, DataFormatError, DegenerateColumnError


class TestStandardize:
    def test_two_values(self):
        out = standardize_per_replicate(np.array([[0.0], [2.0]]))
        np.testing.assert_allclose(out[:, 0], [-0.7071067811865476, 0.7071067811865476], rtol=1e-15)

    def test_idempotent(self, rng):
        once = standardize_per_replicate(rng.standard_normal((30, 4)))
        np.testing.assert_allclose(standardize_per_replicate(once), once, atol=1e-12)

    def test_moments(self, rng):
        out = standardize_per_replicate(rng.uniform(3, 9, (25, 3)))
        np.testing.assert_allclose(out.mean(axis=0), 0, atol=1e-14)
        np.testing.assert_allclose(out.std(axis=0, ddof=1), 1, rtol=1e-14)

    def test_constant_column(self):
        with pytest.raises(DegenerateColumnError, match="column 1"):
            standardize_per_replicate(np.array([[0.0, 1.0], [2.0, 1.0]]))

    def test_single_row(self):
        with pytest.raises(DegenerateColumnError):
            standardize_per_replicate(np.array([[1.0, 2.0]]))


class TestCSV:
    def test_long_round_trip(self, tmp_path, rng):
        locs = rng.uniform(0, 5, (4, 2))
        variables = {"T": rng.standard_normal((3, 4)), "P": rng.standard_normal((3, 4))}
        path = tmp_path / "d.csv"
        write_long_data(path, locs, variables)
        ids, got_locs, reps, got = read_long_data(path)
        assert ids == ["0", "1", "2", "3"] and reps == ["0", "1", "2"]
        np.testing.assert_array_equal(got_locs, locs)
        for k in variables:
            np.testing.assert_array_equal(got[k], variables[k])

    def test_one_dimensional_sites(self, tmp_path):
        path = tmp_path / "d.csv"
        write_long_data(path, np.array([0.0, 1.0]), {"v": np.array([[1.0, 2.0]])})
        _, locs, _, _ = read_long_data(path)
        assert locs.shape == (2, 1)

    def test_numeric_replicate_order(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("site_id,x,y,replicate_id,variable,value\n" + "".join(
            f"a,0,0,{r},v,{r}\nb,1,0,{r},v,{r}\n" for r in (10, 2, 1)))
        _, _, reps, vals = read_long_data(path)
        assert reps == ["1", "2", "10"]
        np.testing.assert_array_equal(vals["v"][:, 0], [1, 2, 10])

    @pytest.mark.parametrize(
        "body,where",
        [
            ("site_id,x,y,variable,value\n", ":1"),
            ("site_id,x,y,replicate_id,variable,value\na,0,0,1,v,1\na,0,zero,2,v,1\n", ":3"),
            ("site_id,x,y,replicate_id,variable,value\na,0,0,1,v,1\na,1,0,2,v,1\n", ":3"),
            ("site_id,x,y,replicate_id,variable,value\na,0,0,1,v,1\na,0,0,1,v,2\n", ":3"),
        ],
    )
    def test_malformed_names_line(self, tmp_path, body, where):
        path = tmp_path / "bad.csv"
        path.write_text(body)
        with pytest.raises(DataFormatError, match="bad.csv" + where):
            read_long_data(path)

    def test_missing_cell(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("site_id,x,y,replicate_id,variable,value\na,0,0,1,v,1\nb,1,0,2,v,1\n")
        with pytest.raises(DataFormatError, match="missing value"):
            read_long_data(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError, match="nope.csv"):
            read_long_data(tmp_path / "nope.csv")

    def test_locations(self, tmp_path):
        path = tmp_path / "l.csv"
        path.write_text("site_id,x,y\ns1,0,1\ns2,2,3\n")
        ids, locs = read_locations(path)
        assert ids == ["s1", "s2"]
        np.testing.assert_array_equal(locs, [[0, 1], [2, 3]])
        path.write_text("site_id,x,y\ns1,0,1\ns1,2,3\n")
        with pytest.raises(DataFormatError, match="l.csv:3"):
            read_locations(path)


class TestConfig:
    def test_load(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[experiment]\nreplications = 3\nn_grid = [10, 20]\n")
        assert load_config(path) == {"experiment": {"replications": 3, "n_grid": [10, 20]}}

    def test_malformed(self, tmp_path):
        path = tmp_path / "c.toml"
        path.write_text("[experiment\nreplications = 3\n")
        with pytest.raises(ConfigError, match="c.toml"):
            load_config(path)

    def test_missing(self, tmp_path):
        with pytest.raises(ConfigError, match="missing.toml"):
            load_config(tmp_path / "missing.toml")

    def test_digest_ignores_order_and_whitespace(self, tmp_path):
        a = tmp_path / "a.toml"
        b = tmp_path / "b.toml"
        a.write_text("[x]\np = 1\nq = 'z'\n[y]\nr = [1, 2]\n")
        b.write_text("[y]\nr=[1,2]\n\n[x]\n  q = 'z'\n  p = 1\n")
        assert config_digest(load_config(a)) == config_digest(load_config(b))
        b.write_text("[y]\nr=[1,3]\n[x]\nq='z'\np=1\n")
        assert config_digest(load_config(a)) != config_digest(load_config(b))

    def test_manifest(self, tmp_path):
        write_manifest(tmp_path / "m.json", {"b": 1, "a": [1]})
        assert json.loads((tmp_path / "m.json").read_text()) == {"a": [1], "b": 1}
