import json
from fractions import Fraction

import pytest

from choco import fixtures
from choco.errors import CertificationFailed, OutOfRange
from choco.perturbation import (Certificate, cayley_chain, certify_admissible, composed_map,
                                delta_epsilon, exact_instance, identity_residual, perturb,
                                perturb_config)
from choco.polynomial import Polynomial
from choco.stability import classify


def test_delta_epsilon_worked_value():
    assert abs(delta_epsilon(fixtures.QUARTIC_DELTA, 0.01) - 0.950097) < 1e-6


def test_delta_epsilon_limits_and_monotonicity():
    d = 0.9744993
    assert abs(delta_epsilon(d, 1e-12) - d) < 1e-10
    vals = [delta_epsilon(d, e) for e in (1e-2, 1e-3, 1e-4)]
    assert vals == sorted(vals) and all(v < d for v in vals)
    assert 0.97449 < vals[-1] < d


@pytest.mark.parametrize("delta,eps", [(0.0, 0.01), (1.0, 0.01), (0.5, 0.0), (0.5, -1), (0.1, 5.0)])
def test_delta_epsilon_out_of_range(delta, eps):
    with pytest.raises(OutOfRange):
        delta_epsilon(delta, eps)


def test_chain_equals_composed_map():
    for e in (Fraction(1, 100), Fraction(3, 7)):
        a, b = composed_map(e), cayley_chain(e)
        ma, mb = [a.a, a.b, a.c, a.d], [b.a, b.b, b.c, b.d]
        ratio = mb[0] / ma[0]
        assert all(y == ratio * x for x, y in zip(ma, mb))


@pytest.fixture(scope="module")
def worked():
    return perturb_config("[1],[],[]", fixtures.QUARTIC_SOLUTION, 0.01)


def test_worked_example(worked):
    c = worked
    assert abs(float(c.delta_hat) - fixtures.EXAMPLE_DELTA_HAT) < 1e-5
    assert c.classifications == ["stable"] * 3
    assert c.identity_residual <= 1e-8
    r = c.critical_root
    assert abs(r.real - 0.950097) < 1e-4 and abs(abs(r.imag) - fixtures.EXAMPLE_CRITICAL_IM) < 1e-4
    assert abs(abs(r) - 1) < 1e-8


def test_worked_example_shapes(worked):
    c = worked
    assert (c.x_hat.degree, c.y_hat.degree, c.z_hat.degree) == (4, 4, 6)
    # y_hat is a degree-4 polynomial with a single root of multiplicity four
    assert c.y_hat == Polynomial([201, 1]) ** 4 * c.y_hat.leading
    # numerator and denominator were rescaled together to a unit max coefficient
    p = c.y_hat * Polynomial([-1, 0, 1])
    assert max(abs(v) for v in (*p.coeffs, *c.z_hat.coeffs)) == 1


def test_state_invariants(worked):
    st = worked.state
    assert st.delta_eps == worked.delta_epsilon
    assert st.R_eps is not None and st.R.num.degree <= st.R.den.degree
    # R_eps agrees with R composed with the map at a sample point
    m = composed_map(Fraction(1, 100))
    s = Fraction(3, 10)
    assert st.R_eps(s) == st.R((m.a * s + m.b) / (m.c * s + m.d))


def test_tiny_epsilon():
    c = perturb_config("[1],[],[]", fixtures.QUARTIC_SOLUTION, 1e-6)
    assert abs(float(c.delta_hat) - delta_epsilon(fixtures.QUARTIC_DELTA, 1e-6)) < 1e-9
    assert float(c.delta_hat) < fixtures.QUARTIC_DELTA


def test_degree10_perturbation_and_degree_preservation():
    d, x, y, z = exact_instance("[3,1],[2],[1]", fixtures.DEG10_SOLUTION)
    c = perturb(d, x, y, z, 1e-3, source_config="[3,1],[2],[1]")
    assert float(c.delta_hat) > 0.974
    assert c.x_hat.degree <= x.degree
    assert c.identity_residual <= 1e-8


def test_convergence_in_epsilon():
    values = _deg6()
    vals = [float(perturb_config("[2],[1],[]", values, e).delta_hat) for e in (1e-2, 1e-3, 1e-4)]
    assert vals[0] < vals[1] < vals[2] < 0.962974


def _deg6():
    from choco.solver import SolverSettings, best_delta, solve_config
    return best_delta(solve_config("[2],[1],[]", SolverSettings()).candidates).values


def test_input_identity_checked():
    d, x, y, z = exact_instance("[1],[],[]", fixtures.QUARTIC_SOLUTION)
    with pytest.raises(CertificationFailed, match="input identity"):
        perturb(d, x, y, z + Polynomial([1]), 0.01)


def test_epsilon_too_large():
    d, x, y, z = exact_instance("[1],[],[]", fixtures.QUARTIC_SOLUTION)
    with pytest.raises(OutOfRange):
        perturb(d, x, y, z, 10.0)


# --- certify_admissible ----------------------------------------------------------------

def test_certify_round_trip_on_perturb_output(worked):
    c = certify_admissible(worked.delta_hat, worked.x_hat, worked.y_hat)
    assert (c.z_hat - worked.z_hat).norm_inf() < 1e-50
    assert all(m < 0 for m in c.margins)


def test_certify_simple_admissible_case():
    # x = (s+1)^2, y = 0, delta = 0.5 gives z = (s^2 - s + 1)(s + 1)^2: not stable
    x = Polynomial([1, 2, 1])
    with pytest.raises(CertificationFailed, match="z stable"):
        certify_admissible(0.5, x, Polynomial())
    # with delta < 0 the low-degree identity is stable
    c = certify_admissible(-0.5, x, Polynomial())
    assert c.classifications == ["stable"] * 3


def test_certify_delta_one_fails():
    with pytest.raises(CertificationFailed):
        certify_admissible(1.0, fixtures.CS_X, fixtures.CS_Y)


def test_certify_degree_order():
    with pytest.raises(CertificationFailed, match="deg"):
        certify_admissible(0.5, Polynomial([1, 1]), Polynomial([1, 2, 1]))


def test_chang_sahinidis_transcription_is_not_certifiable():
    # The transcribed z has tiny negative s^1 and s^2 coefficients, so it is
    # not stable; see the decisions ledger.
    z = Polynomial([1, -2 * fixtures.CS_DELTA, 1]) * fixtures.CS_X + Polynomial([-1, 0, 1]) * fixtures.CS_Y
    assert z[1] < 0 and z[2] < 0
    assert classify(fixtures.CS_X).is_stable and classify(fixtures.CS_Y).is_stable
    with pytest.raises(CertificationFailed, match="z stable"):
        certify_admissible(fixtures.CS_DELTA, fixtures.CS_X, fixtures.CS_Y)


def test_certificate_json_round_trip(worked):
    text = worked.dumps()
    back = Certificate.from_json(json.loads(text))
    assert abs(float(back.delta_hat) - float(worked.delta_hat)) < 1e-15
    assert back.z_hat.to_float() == worked.z_hat.to_float()
    assert back.margins == pytest.approx([float(m) for m in worked.margins])
    assert identity_residual(back.delta_hat, back.x_hat, back.y_hat, back.z_hat) < 1e-8
