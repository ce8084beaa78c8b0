import json

import numpy as np
import pytest

from misoid import (
    DimensionError,
    FirModule,
    MisoSystem,
    ParameterError,
    RegressorBank,
    load_system,
    noise_free_output,
    noisy_output,
    predict,
    push_inputs,
    save_system,
)


def _system(*coeff_lists, noise_std=0.0):
    return MisoSystem(tuple(FirModule(np.array(c, dtype=float)) for c in coeff_lists),
                      noise_std=noise_std)


class TestWindows:
    def test_shift_two_pushes(self):
        bank = RegressorBank.zeros([3])
        bank = push_inputs(bank, [1.0])
        bank = push_inputs(bank, [2.0])
        assert bank.windows[0].tolist() == [2.0, 1.0, 0.0]

    def test_order_one_window_is_latest_sample(self):
        bank = push_inputs(RegressorBank.zeros([1]), [5.0])
        assert bank.windows[0].tolist() == [5.0]

    def test_three_pushes_and_stacking(self):
        # hand-evaluated shift register: pushes 1,2,3 into order-2 window
        bank = RegressorBank.zeros([2, 1])
        for u in ([1.0, 9.0], [2.0, 8.0], [3.0, 7.0]):
            bank = push_inputs(bank, u)
        assert bank.windows[0].tolist() == [3.0, 2.0]
        assert bank.stacked().tolist() == [3.0, 2.0, 7.0]

    def test_shift_property_against_indexed_reconstruction(self):
        rng = np.random.default_rng(3)
        orders = [1, 4, 2]
        samples = rng.normal(size=(10, 3))
        bank = RegressorBank.zeros(orders)
        for t in range(10):
            bank = push_inputs(bank, samples[t])
            for i, ni in enumerate(orders):
                expected = [samples[t - lag, i] if t - lag >= 0 else 0.0
                            for lag in range(ni)]
                assert bank.windows[i].tolist() == pytest.approx(expected)

    def test_dimension_mismatch_rejected(self):
        bank = RegressorBank.zeros([2, 2])
        with pytest.raises(DimensionError):
            push_inputs(bank, [1.0])


class TestOutputs:
    def test_two_module_dot_product(self):
        system = _system([1.0], [2.0])
        bank = RegressorBank((np.array([3.0]), np.array([4.0])))
        assert noise_free_output(system, bank) == 11.0

    def test_zero_windows_give_zero(self):
        system = _system([1.0, 2.0], [3.0])
        assert noise_free_output(system, RegressorBank.for_system(system)) == 0.0

    def test_symmetric_cancellation(self):
        system = _system([1.0, -1.0])
        bank = RegressorBank((np.array([2.0, 2.0]),))
        assert noise_free_output(system, bank) == 0.0

    def test_noisy_is_additive(self):
        system = _system([1.0], [2.0])
        bank = RegressorBank((np.array([3.0]), np.array([4.0])))
        assert noisy_output(system, bank, 0.05) == 11.05
        assert noisy_output(system, bank, -0.1) == pytest.approx(11.0 - 0.1)

    def test_zero_noise_identity_bit_exact(self):
        rng = np.random.default_rng(7)
        system = _system(rng.normal(size=3), rng.normal(size=2))
        bank = RegressorBank.for_system(system)
        for _ in range(5):
            bank = push_inputs(bank, rng.normal(size=2))
        assert noisy_output(system, bank, 0.0) == noise_free_output(system, bank)

    def test_misaligned_bank_rejected(self):
        system = _system([1.0, 2.0])
        with pytest.raises(DimensionError):
            noise_free_output(system, RegressorBank.zeros([3]))


class TestPredict:
    def test_true_parameters_match_noise_free_output(self):
        rng = np.random.default_rng(11)
        system = _system(rng.normal(size=2), rng.normal(size=3))
        bank = RegressorBank.for_system(system)
        for _ in range(4):
            bank = push_inputs(bank, rng.normal(size=2))
        assert predict(system.theta_parts(), bank) == noise_free_output(system, bank)

    def test_zero_parameters(self):
        bank = push_inputs(RegressorBank.zeros([2]), [1.0])
        assert predict([np.zeros(2)], bank) == 0.0

    def test_single_module_scalar(self):
        bank = RegressorBank((np.array([4.0]),))
        assert predict([np.array([0.5])], bank) == 2.0

    def test_linearity(self):
        rng = np.random.default_rng(13)
        bank = RegressorBank.zeros([2, 3])
        for _ in range(5):
            bank = push_inputs(bank, rng.normal(size=2))
        t1 = [rng.normal(size=2), rng.normal(size=3)]
        t2 = [rng.normal(size=2), rng.normal(size=3)]
        a, b = 2.5, -1.25
        combo = [a * x + b * y for x, y in zip(t1, t2)]
        assert predict(combo, bank) == pytest.approx(
            a * predict(t1, bank) + b * predict(t2, bank), rel=1e-12
        )

    def test_dimension_error(self):
        bank = RegressorBank.zeros([2])
        with pytest.raises(DimensionError):
            predict([np.zeros(3)], bank)


class TestValidationAndFiles:
    def test_empty_module_rejected(self):
        with pytest.raises(ParameterError):
            FirModule(np.array([]))

    def test_non_finite_coeffs_rejected(self):
        with pytest.raises(ParameterError):
            FirModule(np.array([1.0, np.nan]))

    def test_system_file_round_trip(self, tmp_path):
        system = _system([0.5, -1.5], [2.0], noise_std=0.1)
        path = tmp_path / "sys.json"
        save_system(system, path)
        doc = json.loads(path.read_text())
        assert set(doc) == {"modules", "noise_std"}
        back = load_system(path)
        assert back.noise_std == system.noise_std
        for a, b in zip(back.modules, system.modules):
            assert a.coeffs.tolist() == b.coeffs.tolist()
