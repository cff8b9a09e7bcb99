import numpy as np
import pytest

from sdi_lab.attacks import (
    AttackScenario,
    EfficiencySearch,
    analytic_bound,
    attack_3tolog6,
    dl_worst_case_search,
    filter_strategy,
    filter_success,
    random_premise_scenario,
    verify_proposition3,
)
from sdi_lab.core import ScenarioDims
from sdi_lab.enums import CheckStatus, SearchMode
from sdi_lab.errors import IndexOutOfRangeError, InvalidScenarioError, SearchSpaceTooLarge
from sdi_lab.rac import RACSpec, nayak_upper_bound, success_report, success_table
from sdi_lab.scenario import (
    DLScenario,
    MeasurementBox,
    random_scenario,
    relabel_efficiencies,
    simulate_dl,
    simulate_ideal,
    without_detection_loss,
)

SPEC = RACSpec(2, 2)


class TestAttack3ToLog6:
    @staticmethod
    def test_attack() -> None:
        attack = attack_3tolog6()
        assert attack.spec == RACSpec(3, 6)
        assert attack.base.dims == ScenarioDims(8, 3, 6, 2)
        assert attack.as_dict()["spec"]["label"] == "3->log6"

        entries = success_table(simulate_dl(attack.base), attack.spec)
        assert np.all(np.abs(entries - 1.0) <= 1e-12)

    @staticmethod
    def test_without_loss() -> None:
        attack = attack_3tolog6()
        report = success_report(simulate_ideal(without_detection_loss(attack.base)), attack.spec)
        assert abs(report.worst_case - 1.0 / 3.0) <= 1e-12
        assert abs(report.average - 2.0 / 3.0) <= 1e-12
        assert report.argmin == (1, 0)
        assert report.average <= nayak_upper_bound(3, attack.spec.m)

    @staticmethod
    def test_search() -> None:
        attack = attack_3tolog6()
        vertex = EfficiencySearch().search(attack, SearchMode.VERTEX)
        assert vertex.value == pytest.approx(1.0)
        assert vertex.evaluated == 3 * 2 ** 6
        assert vertex.discarded >= 3
        assert vertex.efficiencies.shape == (1, 6, 3)
        found = relabel_efficiencies(attack.base, vertex.efficiencies)
        assert success_report(simulate_dl(found), attack.spec).worst_case == pytest.approx(1.0)

        grid = dl_worst_case_search(attack, "grid")
        assert grid.mode is SearchMode.GRID
        assert grid.value == pytest.approx(1.0)
        assert grid.as_dict()["mode"] == "grid"


class TestAttackScenario:
    @staticmethod
    def test_dims() -> None:
        scenario = random_scenario(np.random.default_rng(0), ScenarioDims(4, 3, 2, 2))
        with pytest.raises(InvalidScenarioError):
            AttackScenario(scenario, SPEC)

    @staticmethod
    def test_filter_strategy() -> None:
        rng = np.random.default_rng(31)
        for _ in range(20):
            base = random_scenario(rng, SPEC.dims, bob_strategies=3)
            for i0 in range(3):
                for A0 in range(2):
                    simulated = success_table(simulate_ideal(filter_strategy(base, i0, A0)), SPEC)
                    expected = filter_success(base, SPEC, i0, A0)
                    assert np.abs(simulated - expected).max() <= 1e-9

        with pytest.raises(IndexOutOfRangeError):
            filter_strategy(base, 3, 0)
        with pytest.raises(IndexOutOfRangeError):
            filter_strategy(base, 0, 2)

    @staticmethod
    def test_filter_strategy_ignores_efficiencies() -> None:
        rng = np.random.default_rng(37)
        base = random_scenario(rng, SPEC.dims, bob_strategies=3)
        lossless = without_detection_loss(base)
        for i0 in range(3):
            for A0 in range(2):
                filtered = filter_strategy(base, i0, A0)
                assert np.all(filtered.meas.efficiencies == 1.0)
                assert np.all(filtered.prep.efficiencies == 1.0)
                assert np.array_equal(
                    simulate_ideal(filtered).entries,
                    simulate_ideal(filter_strategy(lossless, i0, A0)).entries,
                )

    @staticmethod
    def test_analytic_bound() -> None:
        rng = np.random.default_rng(32)
        for _ in range(50):
            attack = AttackScenario(random_scenario(rng, SPEC.dims, bob_strategies=3), SPEC)
            bound = analytic_bound(attack)
            assert bound.shape == (4, 2)
            entries = success_table(simulate_dl(attack.base), SPEC)
            assert np.all(entries <= bound + 1e-9)
            result = EfficiencySearch().search(attack, SearchMode.VERTEX)
            assert result.value <= bound.min() + 1e-9


class TestEfficiencySearch:
    @staticmethod
    def test_premise_scenarios() -> None:
        rng = np.random.default_rng(33)
        search = EfficiencySearch()
        for _ in range(20):
            attack = random_premise_scenario(rng)
            premise = success_report(simulate_ideal(attack.base), SPEC).worst_case
            assert premise == pytest.approx(0.5, abs=1e-12)
            for mode in SearchMode:
                assert search.search(attack, mode).value <= 0.5 + 1e-9

    @staticmethod
    def test_vertex_is_deterministic() -> None:
        rng = np.random.default_rng(38)
        search = EfficiencySearch()
        for _ in range(5):
            attack = AttackScenario(random_scenario(rng, SPEC.dims, bob_strategies=3), SPEC)
            first = search.search(attack, SearchMode.VERTEX)
            again = search.search(attack, SearchMode.VERTEX)
            assert first.value == again.value
            assert np.array_equal(first.efficiencies, again.efficiencies)

            # same strategies in another order
            meas = attack.base.meas
            order = rng.permutation(meas.strategy_count)
            shuffled = MeasurementBox(
                meas.dims, meas.priors[order], meas.decoders[order], meas.efficiencies[order]
            )
            reordered = AttackScenario(DLScenario(attack.base.prep, shuffled), SPEC)
            assert search.search(reordered, SearchMode.VERTEX).value == pytest.approx(
                first.value, abs=1e-12
            )

    @staticmethod
    def test_limits() -> None:
        attack = random_premise_scenario(np.random.default_rng(34), mirrored_pairs=4)
        assert attack.base.meas.strategy_count == 8
        with pytest.raises(SearchSpaceTooLarge):
            EfficiencySearch().search(attack, SearchMode.VERTEX)
        with pytest.raises(SearchSpaceTooLarge):
            EfficiencySearch().search(attack, SearchMode.GRID)

        class WideSearch(EfficiencySearch):
            VERTEX_MAX_VARIABLES = 32

        assert WideSearch().search(attack, SearchMode.VERTEX).value <= 0.5 + 1e-9


class TestVerifyProposition3:
    @staticmethod
    def test_report() -> None:
        rng = np.random.default_rng(35)
        instances = [random_premise_scenario(rng) for _ in range(10)]
        instances.append(attack_3tolog6())
        report = verify_proposition3(instances)
        assert report.passed
        assert report.checked_count == 10

        records = report.table.as_records()
        assert len(records) == 11
        assert records[-1]["status"] == CheckStatus.SKIPPED.value
        assert "premise" in records[-1]["note"]
        assert all(record["status"] == "PASS" for record in records[:-1])
        assert all(record["vertex_value"] <= 0.5 + 1e-9 for record in records[:-1])
        assert report.as_dict()["passed"] is True

    @staticmethod
    def test_search_limits_are_reported() -> None:
        attack = random_premise_scenario(np.random.default_rng(36), mirrored_pairs=4)
        report = verify_proposition3([attack])
        record = report.table.get_record(0)
        assert record["status"] == CheckStatus.SKIPPED.value
        assert "vertex skipped" in record["note"]
        assert "grid skipped" in record["note"]
        assert report.passed
        assert report.checked_count == 0

        vertex_only = verify_proposition3([attack], modes=(SearchMode.VERTEX,))
        assert vertex_only.table.get_record(0)["status"] == CheckStatus.SKIPPED.value
        assert vertex_only.checked_count == 0

    @staticmethod
    def test_empty() -> None:
        report = verify_proposition3([])
        assert report.passed
        assert report.checked_count == 0
