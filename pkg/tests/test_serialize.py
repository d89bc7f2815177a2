import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from observer_knowledge.bayes import CountData, Prior
from observer_knowledge.density import BlochVector, DensityMatrix, pauli_expand, probs_from_density
from observer_knowledge.merge import ObserverRecord, merge_noncommuting
from observer_knowledge.serialize import (
    SchemaError,
    counts_from_json,
    counts_to_json,
    density_from_json,
    density_to_json,
    dumps,
    load_json,
    merge_report_to_json,
    prior_from_json,
    prior_to_json,
    scenario_from_json,
    table_from_json,
    table_to_json,
    witness_to_json,
)
from observer_knowledge.violations import find_witness

unit = st.floats(-1.0, 1.0, allow_nan=False)


def through_text(doc):
    return json.loads(dumps(doc))


class TestRoundTrips:
    @given(unit, unit, unit)
    def test_density(self, x, y, z):
        rho = pauli_expand(BlochVector(x, y, z))
        back = density_from_json(through_text(density_to_json(rho)))
        np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-15, rtol=0)

    def test_density_dim4(self):
        rng = np.random.default_rng(0)
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = g @ g.conj().T
        rho = DensityMatrix(m / np.trace(m).real)
        back = density_from_json(through_text(density_to_json(rho)))
        np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-15, rtol=0)

    def test_table(self):
        t = probs_from_density(pauli_expand(BlochVector(0.1, 0.2, 0.3)))
        back = table_from_json(through_text(table_to_json(t)))
        np.testing.assert_allclose(back.p_diag, t.p_diag, atol=1e-15)
        np.testing.assert_allclose(back.delta_x, t.delta_x, atol=1e-15)
        np.testing.assert_allclose(back.delta_y, t.delta_y, atol=1e-15)

    @given(st.sampled_from(["x", "y", "z", "nuclear", "electron"]), st.integers(0, 10**9), st.integers(0, 10**9))
    def test_counts(self, axis, up, down):
        rec = counts_from_json(through_text(counts_to_json(axis, CountData(up, down))))
        assert rec.axis == axis and rec.counts == CountData(up, down)

    @pytest.mark.parametrize(
        "prior", [Prior.uniform(), Prior.beta_prior(2.5, 0.5), Prior.tabulated([-1, 0, 1], [0.2, 1.0, 0.4])]
    )
    def test_prior(self, prior):
        assert prior_from_json(through_text(prior_to_json(prior))) == prior

    def test_merge_report(self):
        r = merge_noncommuting(
            ObserverRecord("Z", "z", CountData(98, 0)), ObserverRecord("X", "x", CountData(98, 0))
        )
        doc = through_text(merge_report_to_json(r))
        assert doc["verdict"] == "unphysical" and doc["min_eigenvalue"] < 0
        np.testing.assert_allclose(density_from_json(doc["merged"]).matrix, r.merged.matrix, atol=1e-15)

    def test_witness(self):
        doc = through_text(witness_to_json(find_witness(DensityMatrix(np.diag([1.2, -0.2])))))
        assert set(doc) == {"deficit", "lhs", "rhs", "obs_a", "obs_b"}
        assert doc["deficit"] == pytest.approx(-0.96)
        assert witness_to_json(None) is None


class TestSchemaErrors:
    def test_missing_count_field(self):
        with pytest.raises(SchemaError) as exc:
            counts_from_json({"axis": "z", "n_up": 3})
        assert exc.value.field == "counts.n_down"

    def test_bad_axis(self):
        with pytest.raises(SchemaError) as exc:
            counts_from_json({"axis": "q", "n_up": 3, "n_down": 1})
        assert exc.value.field == "counts.axis"

    def test_float_count(self):
        with pytest.raises(SchemaError) as exc:
            counts_from_json({"axis": "z", "n_up": 1.5, "n_down": 1})
        assert exc.value.field == "counts.n_up"

    def test_ragged_matrix(self):
        with pytest.raises(SchemaError) as exc:
            density_from_json({"dim": 2, "re": [[1, 0], [0]]})
        assert exc.value.field == "matrix.re"

    def test_unknown_prior(self):
        with pytest.raises(SchemaError) as exc:
            prior_from_json({"kind": "jeffreys"})
        assert exc.value.field == "prior.kind"

    def test_scenario_run_field(self):
        doc = {"truth": {"electron": [0, 0, 0]}, "seed": 1, "runs": [{"axis": "z", "n": 10}, {"axis": "z"}]}
        with pytest.raises(SchemaError) as exc:
            scenario_from_json(doc)
        assert exc.value.field == "scenario.runs[1].n"

    def test_scenario_long_bloch(self):
        doc = {"truth": {"electron": [1, 1, 0]}, "seed": 1, "runs": []}
        with pytest.raises(SchemaError) as exc:
            scenario_from_json(doc)
        assert exc.value.field == "scenario.truth.electron"

    def test_nuclear_run_without_nuclear_truth(self):
        doc = {"truth": {"electron": [0, 0, 0], "nuclear": None}, "seed": 1, "runs": [{"axis": "nuclear", "n": 5}]}
        with pytest.raises(SchemaError):
            scenario_from_json(doc)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            load_json(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(SchemaError):
            load_json(p)


class TestScenario:
    def test_defaults(self):
        doc = {
            "truth": {"electron": [0, 0, 1], "nuclear": [0, 0, 0.6]},
            "seed": 2**64 - 1,
            "runs": [{"axis": "z", "n": 3}, {"axis": "x", "n": 4, "eff_down": 0.0, "first_axis": "z"}],
        }
        src, runs = scenario_from_json(doc)
        assert src.seed == 2**64 - 1 and src.nuclear.sz == 0.6
        assert runs[0].detector.eff_up == 1.0 and runs[0].first_axis is None
        assert runs[1].detector.eff_down == 0.0 and runs[1].first_axis == "z" and runs[1].keep == "up"
