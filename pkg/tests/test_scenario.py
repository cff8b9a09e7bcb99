from typing import Tuple

import numpy as np
import pytest

from sdi_lab.core import ScenarioDims, total_variation_distance
from sdi_lab.errors import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    InvalidScenarioError,
    ZeroClickProbability,
)
from sdi_lab.scenario import (
    DLScenario,
    MeasurementBox,
    PreparationBox,
    click_given_inputs,
    click_given_message,
    click_table,
    effective_preparation,
    message_click_table,
    random_scenario,
    relabel_efficiencies,
    simulate_dl,
    simulate_dl_full,
    simulate_ideal,
    without_detection_loss,
)

RELAY_DIMS = ScenarioDims(2, 1, 2, 2)


def relay_scenario(bob_efficiency: float = 1.0) -> DLScenario:
    decoder = np.eye(2)[:, None, :]
    efficiency = np.full((2, 1), bob_efficiency)
    return DLScenario(
        PreparationBox.single(RELAY_DIMS, np.eye(2)),
        MeasurementBox.single(RELAY_DIMS, decoder, efficiency),
    )


def with_efficiency(scenario: DLScenario, index: Tuple[int, int, int], value: float) -> DLScenario:
    efficiencies = scenario.meas.efficiencies.copy()
    efficiencies[index] = value
    return relabel_efficiencies(scenario, bob_efficiencies=efficiencies)


class TestBoxes:
    @staticmethod
    def test_preparation_box() -> None:
        prep = PreparationBox(RELAY_DIMS, [0.25, 0.75], [np.eye(2), np.eye(2)[::-1]])
        assert prep.strategy_count == 2
        assert prep.efficiencies.tolist() == [[1.0, 1.0], [1.0, 1.0]]
        assert prep.mixture().tolist() == [[0.25, 0.75], [0.75, 0.25]]
        assert prep.as_dict()["strategies"][1] == {
            "q": 0.75,
            "encoder": [[0.0, 1.0], [1.0, 0.0]],
            "eta_a": [1.0, 1.0],
        }

        with pytest.raises(InvalidScenarioError):
            PreparationBox(RELAY_DIMS, [0.5, 0.6], [np.eye(2), np.eye(2)])
        with pytest.raises(InvalidScenarioError):
            PreparationBox.single(RELAY_DIMS, [[0.5, 0.6], [0.0, 1.0]])
        with pytest.raises(InvalidScenarioError):
            PreparationBox.single(RELAY_DIMS, np.eye(2), [1.0, 1.5])
        with pytest.raises(DimensionMismatchError):
            PreparationBox.single(RELAY_DIMS, np.eye(3))

    @staticmethod
    def test_measurement_box() -> None:
        decoder = np.eye(2)[:, None, :]
        meas = MeasurementBox(RELAY_DIMS, [0.5, 0.5], [decoder, decoder[:, :, ::-1]])
        assert meas.strategy_count == 2
        assert np.allclose(meas.mixture(), 0.5)
        assert meas.as_dict()["strategies"][0]["eta"] == [[1.0], [1.0]]
        assert meas.click_rates().tolist() == [[1.0], [1.0]]
        assert np.allclose(meas.weighted_mixture(), meas.mixture())

        lossy = MeasurementBox.single(RELAY_DIMS, decoder, [[0.5], [0.25]])
        assert lossy.click_rates().tolist() == [[0.5], [0.25]]
        assert lossy.weighted_mixture()[:, 0, :].tolist() == [[0.5, 0.0], [0.0, 0.25]]

        with pytest.raises(InvalidScenarioError):
            MeasurementBox.single(RELAY_DIMS, np.full((2, 1, 2), 0.6))
        with pytest.raises(InvalidScenarioError):
            MeasurementBox.single(RELAY_DIMS, decoder, [[-0.1], [1.0]])
        with pytest.raises(DimensionMismatchError):
            MeasurementBox(RELAY_DIMS, [[1.0]], decoder[None])

    @staticmethod
    def test_scenario_dims() -> None:
        scenario = relay_scenario()
        assert scenario.dims == RELAY_DIMS
        assert set(scenario.as_dict()) == {"dims", "prep", "meas"}

        other = ScenarioDims(2, 1, 3, 2)
        with pytest.raises(DimensionMismatchError):
            DLScenario(
                PreparationBox.single(RELAY_DIMS, np.eye(2)),
                MeasurementBox.single(other, np.full((3, 1, 2), 0.5)),
            )


class TestSimulate:
    @staticmethod
    def test_relay() -> None:
        scenario = relay_scenario()
        identity = np.eye(2)[:, :, None]
        assert simulate_ideal(scenario).entries.tolist() == identity.tolist()
        assert simulate_dl(scenario).entries.tolist() == identity.tolist()
        assert simulate_dl_full(scenario).entries.tolist() == identity.tolist()

    @staticmethod
    def test_all_efficiencies_one() -> None:
        rng = np.random.default_rng(1)
        for _ in range(20):
            scenario = without_detection_loss(random_scenario(rng, ScenarioDims(3, 2, 2, 3)))
            ideal = simulate_ideal(scenario)
            assert total_variation_distance(simulate_dl_full(scenario), ideal) <= 1e-12
            assert total_variation_distance(simulate_dl(scenario), ideal) <= 1e-12

    @staticmethod
    def test_zero_click() -> None:
        scenario = relay_scenario(bob_efficiency=0.0)
        with pytest.raises(ZeroClickProbability) as exc_info:
            simulate_dl(scenario)
        assert exc_info.value.data == {"a": 0, "b": 0}
        with pytest.raises(ZeroClickProbability):
            simulate_dl_full(scenario)
        assert simulate_ideal(scenario).entries[1, 1, 0] == 1.0

    @staticmethod
    def test_post_selection_lifts_success() -> None:
        # Bob only clicks when his guess for A=0 matches
        dims = RELAY_DIMS
        prep = PreparationBox.single(dims, np.full((2, 2), 0.5))
        decoder = np.eye(2)[:, None, :]
        meas = MeasurementBox.single(dims, decoder, [[1.0], [0.0]])
        scenario = DLScenario(prep, meas)
        assert simulate_ideal(scenario).entries[:, :, 0].tolist() == [[0.5, 0.5], [0.5, 0.5]]
        assert simulate_dl(scenario).entries[:, :, 0].tolist() == [[1.0, 1.0], [0.0, 0.0]]
        assert click_table(scenario).entries.tolist() == [[0.5], [0.5]]

    @staticmethod
    def test_alice_loss_is_irrelevant() -> None:
        rng = np.random.default_rng(2)
        for _ in range(50):
            scenario = random_scenario(rng, ScenarioDims(3, 2, 3, 2), alice_strategies=3)
            folded = DLScenario(effective_preparation(scenario.prep), scenario.meas)
            difference = simulate_dl_full(scenario).entries - simulate_dl(folded).entries
            assert np.abs(difference).max() <= 1e-9

    @staticmethod
    def test_alice_always_clicks() -> None:
        rng = np.random.default_rng(3)
        scenario = random_scenario(rng, ScenarioDims(2, 2, 2, 2), alice_clicks=False)
        assert np.allclose(simulate_dl_full(scenario).entries, simulate_dl(scenario).entries)

    @staticmethod
    def test_convexity() -> None:
        rng = np.random.default_rng(4)
        scenario = random_scenario(rng, ScenarioDims(2, 2, 2, 2), alice_strategies=1)
        prep = scenario.prep
        split = PreparationBox(
            prep.dims,
            [0.3, 0.7],
            np.repeat(prep.encoders, 2, axis=0),
            np.repeat(prep.efficiencies, 2, axis=0),
        )
        refined = DLScenario(split, scenario.meas)
        assert np.allclose(simulate_ideal(refined).entries, simulate_ideal(scenario).entries)

    @staticmethod
    def test_single_efficiency_monotone() -> None:
        rng = np.random.default_rng(7)
        dims = ScenarioDims(2, 2, 3, 2)
        for _ in range(10):
            scenario = random_scenario(rng, dims)
            i, A, b = (int(rng.integers(n)) for n in scenario.meas.efficiencies.shape)
            curve = [
                simulate_dl(with_efficiency(scenario, (i, A, b), value)).entries
                for value in (0.1, 0.5, 1.0)
            ]
            rising = curve[1] - curve[0]
            rest = curve[2] - curve[1]
            assert np.all(rising * rest >= -1e-12)
            assert np.allclose(rising[:, :, np.arange(2) != b], 0.0)


class TestClicks:
    @staticmethod
    def test_effective_preparation() -> None:
        dims = ScenarioDims(1, 1, 2, 2)
        prep = PreparationBox(dims, [0.75, 0.25], [[[1, 0]], [[0, 1]]], [[1 / 3], [1]])
        folded = effective_preparation(prep)
        assert folded.strategy_count == 1
        assert np.allclose(folded.encoders[0], [[0.5, 0.5]])
        assert folded.efficiencies.tolist() == [[1.0]]

        silent = PreparationBox(dims, [1.0], [[[1, 0]]], [[0.0]])
        with pytest.raises(ZeroClickProbability):
            effective_preparation(silent)

    @staticmethod
    def test_click_tables() -> None:
        rng = np.random.default_rng(5)
        scenario = random_scenario(rng, ScenarioDims(3, 2, 2, 2))
        table = click_table(scenario)
        by_message = message_click_table(scenario)
        assert by_message.shape == (2, 2)
        for a in range(3):
            for b in range(2):
                assert click_given_inputs(scenario, a, b) == table.entries[a, b]
        for A in range(2):
            for b in range(2):
                assert click_given_message(scenario, A, b) == by_message[A, b]

        expected = scenario.prep.mixture() @ by_message
        assert np.allclose(table.entries, expected)

        with pytest.raises(IndexOutOfRangeError):
            click_given_inputs(scenario, 3, 0)
        with pytest.raises(IndexOutOfRangeError):
            click_given_message(scenario, 0, -1)

    @staticmethod
    def test_relabel_efficiencies() -> None:
        scenario = relay_scenario()
        relabeled = relabel_efficiencies(scenario, bob_efficiencies=[[[0.5], [0.25]]])
        assert relabeled.meas.efficiencies.tolist() == [[[0.5], [0.25]]]
        assert relabeled.prep is scenario.prep
        assert message_click_table(relabeled).tolist() == [[0.5], [0.25]]

        lossless = without_detection_loss(relabeled)
        assert lossless.meas.efficiencies.tolist() == [[[1.0], [1.0]]]

    @staticmethod
    def test_random_scenario() -> None:
        rng = np.random.default_rng(6)
        dims = ScenarioDims(4, 2, 3, 2)
        scenario = random_scenario(rng, dims, bob_strategies=3, message_independent_clicks=True)
        assert scenario.meas.strategy_count == 3
        efficiencies = scenario.meas.efficiencies
        assert np.all(efficiencies == efficiencies[:, :1, :])
        assert np.all(efficiencies >= 0.1)

        same = random_scenario(
            np.random.default_rng(6), dims, bob_strategies=3, message_independent_clicks=True
        )
        assert np.array_equal(same.prep.encoders, scenario.prep.encoders)
