import numpy as np
import pytest

from carleman.errors import ParameterError
from carleman.params import (PowerExponents, admissible_powers, necessity_check,
                             validate_params)
from conftest import random_valid_paramset


class TestValidate:
    def test_sobolev_tuple_valid(self):
        ps = validate_params(3, 1.5, 3.0, 3.0, 0.0, "a")
        assert ps.gamma_prime == pytest.approx(1.5)
        # max(p, p') = 3 <= gamma = 3 <= q = 3 and the tau = 0 window holds
        assert 1 / ps.n < 1 / ps.gamma_prime <= 1 / ps.n + 1 / ps.q

    def test_log_case_valid(self):
        ps = validate_params(2, 2.0, 2.0, 2.0, 1.0, "a")
        assert ps.case == "a" and ps.tau == 1.0

    def test_q_below_p_rejected_in_part_a(self):
        with pytest.raises(ParameterError, match="q < p in part \\(a\\)"):
            validate_params(3, 3.0, 2.0, 2.0, 0.0, "a")

    def test_gamma_below_dual_bound_rejected(self):
        with pytest.raises(ParameterError, match="gamma below max"):
            validate_params(3, 1.5, 3.0, 2.0, 0.0, "a")  # p' = 3 > gamma

    def test_part_b_needs_q_below_p(self):
        with pytest.raises(ParameterError, match="p <= q in part \\(b\\)"):
            validate_params(2, 2.0, 2.0, 2.0, 0.0, "b")

    def test_part_b_tau_zero_gamma_window(self):
        with pytest.raises(ParameterError, match="n/\\(n-1\\)"):
            validate_params(2, 3.0, 2.0, 2.0, 0.0, "b")  # gamma = n/(n-1) = 2 not strict
        ps = validate_params(2, 3.0, 2.0, 2.0, 1.0, "b")  # relaxed for tau > 0
        assert ps.case == "b"

    def test_part_b_one_dimension_tau_zero_impossible(self):
        with pytest.raises(ParameterError):
            validate_params(1, 3.0, 2.0, 1.5, 0.0, "b")

    def test_dual_exponent_identities(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            ps = random_valid_paramset(rng)
            assert abs(1 / ps.p + 1 / ps.p_prime - 1) < 1e-14
            assert abs(1 / ps.gamma + 1 / ps.gamma_prime - 1) < 1e-14

    def test_idempotent(self):
        ps = validate_params(3, 1.5, 3.0, 3.0, 0.0, "a")
        ps2 = validate_params(ps.n, ps.p, ps.q, ps.gamma, ps.tau, ps.case)
        assert ps == ps2
        assert (ps2.p_prime, ps2.gamma_prime, ps2.r) == (ps.p_prime, ps.gamma_prime, ps.r)

    def test_r_infinite_when_p_equals_q(self):
        ps = validate_params(3, 2.0, 2.0, 2.0, 0.0, "a")
        assert ps.r == np.inf
        ps2 = validate_params(3, 1.5, 3.0, 3.0, 0.0, "a")
        assert ps2.r == pytest.approx(3.0)

    def test_log_case_needs_positive_tau(self):
        # gamma' = n makes the tau = 0 window empty (strict left inequality)
        with pytest.raises(ParameterError, match="exceed 1/n"):
            validate_params(2, 2.0, 2.0, 2.0, 0.0, "a")


class TestAdmissiblePowers:
    def test_sobolev_case_pins_zero_exponents(self):
        ps = validate_params(3, 1.5, 3.0, 3.0, 0.0, "a")
        region = admissible_powers(ps)
        assert region.alpha1_max == pytest.approx(0.0, abs=1e-14)
        assert region.beta1_max == pytest.approx(0.0, abs=1e-14)
        assert region.contains(PowerExponents(0, 0, 0, 0))
        assert not region.contains(PowerExponents(0.5, 0.5, 0, 0))

    def test_hardy_bound(self):
        ps = validate_params(3, 2.0, 2.0, 2.0, 0.0, "a")
        region = admissible_powers(ps)
        assert region.alpha1_max == pytest.approx(2.0)
        assert region.beta1_max == pytest.approx(0.0, abs=1e-14)
        assert region.contains(PowerExponents(2.0, 2.0, 0.0, 0.0))

    def test_tau_positive_relaxes_alpha2(self):
        ps0 = validate_params(3, 2.0, 2.0, 2.0, 0.0, "a")
        ps1 = validate_params(3, 2.0, 2.0, 2.0, 1.0, "a")
        assert admissible_powers(ps0).alpha2_min == pytest.approx(2.0)
        assert admissible_powers(ps1).alpha2_min == 0.0
        # alpha2 below the tau = 0 floor is admissible only for tau > 0
        pw = PowerExponents(1.0, 0.5, 0.0, 0.0)
        assert not admissible_powers(ps0).contains(pw)
        assert admissible_powers(ps1).contains(pw)

    def test_bounds_nonnegative_for_tau_zero_tuples(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            ps = random_valid_paramset(rng, tau_zero=True)
            region = admissible_powers(ps)
            assert region.alpha1_max >= -1e-12
            assert region.beta1_max >= -1e-12


class TestNecessity:
    def test_sobolev_exact(self):
        ps = validate_params(3, 1.5, 3.0, 3.0, 0.0, "a")
        assert necessity_check(0.0, 0.0, ps) == "exact"

    def test_hardy_exact(self):
        ps = validate_params(3, 2.0, 2.0, 2.0, 0.0, "a")
        assert necessity_check(2.0, 0.0, ps) == "exact"

    def test_subcritical_allowed_for_positive_tau(self):
        ps = validate_params(3, 2.0, 2.0, 2.0, 2.0, "a")
        assert necessity_check(0.0, 0.0, ps) == "subcritical"

    def test_violations(self):
        ps0 = validate_params(3, 2.0, 2.0, 2.0, 0.0, "a")
        assert necessity_check(0.0, 0.0, ps0) == "violated"  # equality required
        ps1 = validate_params(3, 2.0, 2.0, 2.0, 1.0, "a")
        assert necessity_check(3.0, 0.0, ps1) == "violated"  # above the balance

    def test_boundary_exponents_balance_exactly(self):
        # the corner of the admissible box sits on the scaling balance
        rng = np.random.default_rng(23)
        for _ in range(40):
            ps = random_valid_paramset(rng, tau_zero=True)
            region = admissible_powers(ps)
            assert necessity_check(region.alpha1_max, region.beta1_max, ps) == "exact"
