import numpy as np
import pytest

from sdi_lab.attacks import attack_3tolog6
from sdi_lab.audit import (
    Auditor,
    EventLog,
    audit,
    cell_counts,
    check_prop1_condition,
    check_prop2_condition,
    estimate_from_log,
    estimated_tolerance,
    prop2_dichotomy,
    sample_event_log,
)
from sdi_lab.classical_model import ClassicalMembership
from sdi_lab.core import ClickTable, ConditionalDistribution, ScenarioDims
from sdi_lab.enums import AuditVerdict, CheckStatus, DichotomyBranch
from sdi_lab.errors import EmptyCell, IndexOutOfRangeError
from sdi_lab.quantum import qrac2_protocol, quantum_statistics
from sdi_lab.scenario import (
    DLScenario,
    PreparationBox,
    click_table,
    random_scenario,
    relabel_efficiencies,
    simulate_dl,
    simulate_dl_full,
)
from sdi_lab.sentinel import NO_CLICK

RAC_DIMS = ScenarioDims(4, 2, 2, 2)


class TestEventLog:
    @staticmethod
    def test_rounds() -> None:
        log = EventLog.from_rounds([(0, 1, 1), (1, 0, NO_CLICK), (1, 1, 0)])
        assert len(log) == 3
        assert list(log) == [(0, 1, 1), (1, 0, NO_CLICK), (1, 1, 0)]
        assert log.clicked.tolist() == [True, False, True]
        assert log.infer_dims(2) == ScenarioDims(2, 2, 2, 2)
        assert EventLog.from_rounds([]).infer_dims(3) == ScenarioDims(1, 1, 3, 1)

        with pytest.raises(IndexOutOfRangeError):
            EventLog.from_rounds([(-1, 0, 0)])
        with pytest.raises(IndexOutOfRangeError):
            EventLog(np.array([0, 1]), np.array([0]), np.array([0]))

    @staticmethod
    def test_counts() -> None:
        log = EventLog.from_rounds(
            [(0, 0, 1), (0, 0, 0), (0, 0, NO_CLICK), (1, 0, 1), (0, 1, 0), (1, 1, 1)]
        )
        dims = ScenarioDims(2, 2, 2, 2)
        counts = cell_counts(log, dims)
        assert counts.rounds.tolist() == [[3, 1], [1, 1]]
        assert counts.clicks.tolist() == [[2, 1], [1, 1]]
        assert counts.outcomes[:, 0, 0].tolist() == [1, 1]

        distribution, clicks = estimate_from_log(log, dims)
        assert distribution.entries[:, 0, 0].tolist() == [0.5, 0.5]
        assert distribution.entries[:, 1, 0].tolist() == [0.0, 1.0]
        assert clicks.entries[0, 0] == pytest.approx(2 / 3)
        assert clicks.entries[1, 1] == 1.0

        with pytest.raises(IndexOutOfRangeError):
            cell_counts(log, ScenarioDims(1, 2, 2, 2))

    @staticmethod
    def test_empty_cell() -> None:
        log = EventLog.from_rounds([(0, 0, 1), (0, 1, 0), (1, 0, NO_CLICK), (1, 1, 1)])
        with pytest.raises(EmptyCell) as exc_info:
            estimate_from_log(log, ScenarioDims(2, 2, 2, 2))
        assert exc_info.value.data == {"a": 1, "b": 0}
        assert exc_info.value.exit_code == 4


class TestSampling:
    @staticmethod
    def _scenario() -> DLScenario:
        scenario = random_scenario(np.random.default_rng(41), ScenarioDims(2, 1, 2, 2))
        return relabel_efficiencies(
            scenario, 0.5 + 0.5 * scenario.meas.efficiencies, 0.5 + 0.5 * scenario.prep.efficiencies
        )

    def test_bob_only(self) -> None:
        scenario = self._scenario()
        log = sample_event_log(scenario, 10 ** 6, np.random.default_rng(42), alice_clicks=False)
        assert len(log) == 10 ** 6
        distribution, clicks = estimate_from_log(log, scenario.dims)
        assert np.abs(distribution.entries - simulate_dl(scenario).entries).max() <= 5e-3
        assert np.abs(clicks.entries - click_table(scenario).entries).max() <= 5e-3

    def test_with_alice(self) -> None:
        scenario = self._scenario()
        log = sample_event_log(scenario, 10 ** 6, np.random.default_rng(43))
        distribution, _ = estimate_from_log(log, scenario.dims)
        assert np.abs(distribution.entries - simulate_dl_full(scenario).entries).max() <= 5e-3

    @staticmethod
    def test_deterministic() -> None:
        scenario = random_scenario(np.random.default_rng(44), RAC_DIMS)
        first = sample_event_log(scenario, 1000, np.random.default_rng(0))
        second = sample_event_log(scenario, 1000, np.random.default_rng(0))
        assert list(first) == list(second)


class TestConditions:
    @staticmethod
    def test_prop2_condition() -> None:
        dims = ScenarioDims(2, 2, 2, 2)
        check = check_prop2_condition(ClickTable(dims, [[0.5, 0.2], [0.5, 0.2]]))
        assert check.passed
        assert check.deviation == 0.0
        assert check.as_dict() == {"status": "PASS", "deviation": 0.0, "tolerance": 1e-6}

        check = check_prop2_condition(ClickTable(dims, [[0.5, 0.2], [0.4, 0.2]]), tol=0.01)
        assert check.status is CheckStatus.FAIL
        assert check.deviation == pytest.approx(0.1)

    @staticmethod
    def test_prop1_condition() -> None:
        rng = np.random.default_rng(45)
        independent = random_scenario(rng, RAC_DIMS, message_independent_clicks=True)
        assert check_prop1_condition(independent).passed
        assert check_prop2_condition(click_table(independent)).passed
        assert not check_prop1_condition(random_scenario(rng, RAC_DIMS)).passed

    @staticmethod
    def test_dichotomy() -> None:
        rng = np.random.default_rng(46)
        independent = random_scenario(rng, RAC_DIMS, message_independent_clicks=True)
        assert prop2_dichotomy(independent) is DichotomyBranch.CLICK_INDEPENDENT_OF_MESSAGE

        dependent = random_scenario(rng, RAC_DIMS)
        assert prop2_dichotomy(dependent) is None

        constant = DLScenario(
            PreparationBox.single(RAC_DIMS, np.full((4, 2), 0.5)), dependent.meas
        )
        assert prop2_dichotomy(constant) is DichotomyBranch.MESSAGE_INDEPENDENT_OF_INPUT
        assert check_prop2_condition(click_table(constant)).passed

    @staticmethod
    def test_estimated_tolerance() -> None:
        dims = ScenarioDims(2, 1, 2, 2)
        assert estimated_tolerance(ClickTable.ones(dims), np.array([[10], [10]])) == 1e-6
        tolerance = estimated_tolerance(ClickTable(dims, [[0.5], [0.5]]), np.array([[100], [100]]))
        assert tolerance == pytest.approx(3 * np.sqrt(2) * 0.05)
        assert estimated_tolerance(
            ClickTable(dims, [[0.5], [0.5]]), np.array([[100], [100]]), standard_errors=1.0
        ) == pytest.approx(np.sqrt(2) * 0.05)


class TestAuditor:
    def setup_method(self) -> None:
        self.statistics = quantum_statistics(qrac2_protocol())
        self.auditor = Auditor()

    def test_robust(self) -> None:
        report = self.auditor.audit(self.statistics, ClickTable.ones(RAC_DIMS), d=2)
        assert report.verdict is AuditVerdict.DL_ROBUST_NONCLASSICAL
        assert report.prop2_condition.passed
        assert report.membership is not None
        assert not report.membership.is_feasible
        assert report.prop1_condition is None

        data = report.as_dict()
        assert data["verdict"] == AuditVerdict.DL_ROBUST_NONCLASSICAL.value
        assert data["membership"]["witness"]["bound"] == report.membership.witness.bound

    def test_not_robust(self) -> None:
        clicks = ClickTable(RAC_DIMS, [[0.9, 0.9], [0.5, 0.9], [0.9, 0.9], [0.9, 0.9]])
        report = self.auditor.audit(self.statistics, clicks, d=2)
        assert report.verdict is AuditVerdict.NONCLASSICAL_NOT_DL_ROBUST
        assert not report.prop2_condition.passed

    def test_classical(self) -> None:
        report = audit(ConditionalDistribution.uniform(RAC_DIMS), ClickTable.ones(RAC_DIMS), d=1)
        assert report.verdict is AuditVerdict.CLASSICALLY_EXPLAINABLE
        assert report.membership is not None
        assert report.membership.is_feasible

    def test_out_of_scope(self) -> None:
        attack = attack_3tolog6()
        report = self.auditor.audit(
            simulate_dl(attack.base), click_table(attack.base), d=6, scenario=attack.base
        )
        assert report.verdict is AuditVerdict.OUT_OF_SCOPE_DIMENSION
        assert report.membership is None
        assert "cap" in report.membership_note
        assert report.prop1_condition is not None
        assert not report.prop1_condition.passed

    def test_feasible_is_never_robust(self) -> None:
        rng = np.random.default_rng(49)
        feasible = 0
        for independent in (True, False):
            for _ in range(8):
                scenario = random_scenario(rng, RAC_DIMS, message_independent_clicks=independent)
                for d in (1, 2):
                    report = self.auditor.audit(simulate_dl(scenario), click_table(scenario), d)
                    if report.membership is not None and report.membership.is_feasible:
                        feasible += 1
                        assert report.verdict is not AuditVerdict.DL_ROBUST_NONCLASSICAL
        assert feasible >= 8

    def test_undecided(self) -> None:
        auditor = Auditor(ClassicalMembership(enumeration_cap=10))
        report = auditor.audit(self.statistics, ClickTable.ones(RAC_DIMS), d=2)
        assert report.verdict is AuditVerdict.MEMBERSHIP_UNDECIDED
        assert report.as_dict()["membership"] is None

    def test_audit_log(self) -> None:
        dims = ScenarioDims(2, 2, 2, 2)
        scenario = random_scenario(np.random.default_rng(47), dims)
        log = sample_event_log(scenario, 20000, np.random.default_rng(48))
        report = self.auditor.audit_log(log, d=2)
        assert report.d == 2
        assert report.distribution.dims == dims
        assert report.prop2_condition.tolerance > Auditor.CONDITION_TOLERANCE
        assert report.verdict is AuditVerdict.CLASSICALLY_EXPLAINABLE

        explicit = self.auditor.audit_log(log, d=2, tol=0.25)
        assert explicit.prop2_condition.tolerance == 0.25
        assert explicit.prop2_condition.deviation == report.prop2_condition.deviation

        with pytest.raises(EmptyCell):
            self.auditor.audit_log(EventLog.from_rounds([(0, 0, 1), (1, 1, 0)]), d=2)
