from __future__ import annotations

from fractions import Fraction

import pytest

from zfcert import reference as ref
from zfcert.certificate import Status
from zfcert.kappasearch import (CandidateKappa, equioscillation_count, linf_error, minimax_fit, normalize,
                                reference_candidates, score_candidate, search)


def test_constant_fit():
    c = minimax_fit(0)
    assert c.fit_coefficients == (Fraction(3, 4),)
    assert c.coefficients == (Fraction(1),)
    assert c.linf_error.contains(Fraction(1, 4)) and c.linf_error.width() < 1e-6


def test_linear_fit_equioscillates_at_three_points():
    c = minimax_fit(1)
    assert equioscillation_count(c.fit_coefficients) == 3


def test_degree_six_fit_beats_published_vector():
    fit = minimax_fit(6)
    published = reference_candidates()["published"]
    assert fit.linf_error.hi < published.linf_error.lo


@pytest.mark.parametrize("M", [1, 3, 6])
def test_fit_never_worse_than_constant_tail(M):
    fit = minimax_fit(M)
    baseline = linf_error((Fraction(3, 4),) + (Fraction(0),) * M)
    assert not fit.linf_error.certainly_gt(baseline)


def test_fit_argument_errors():
    with pytest.raises(ValueError):
        minimax_fit(3, grid_size=5)
    with pytest.raises(ValueError):
        minimax_fit(-1)
    with pytest.raises(ValueError):
        search(13)
    with pytest.raises(ValueError):
        normalize((Fraction(0), Fraction(1)))


def test_reference_efficiencies():
    refs = {k: score_candidate(v) for k, v in reference_candidates().items()}
    assert refs["published"].efficiency == Fraction(859, 433)
    assert refs["published"].feasible is Status.PASS
    assert abs(float(refs["published"].efficiency) - 2) < 0.02
    assert refs["single"].efficiency == 1
    assert abs(float(refs["two-term"].efficiency) - 1.78) < 0.01


def test_scoring_is_deterministic_and_feasibility_sound():
    c = reference_candidates()["published"]
    first, second = score_candidate(c), score_candidate(c)
    assert (first.efficiency, first.feasible) == (second.efficiency, second.feasible)
    again = score_candidate(first)
    assert again.feasible is first.feasible is Status.PASS


def test_infeasible_candidate_is_recorded():
    bad = CandidateKappa.from_coefficients((Fraction(1), Fraction(-2)), "bad")
    assert score_candidate(bad).feasible is Status.FAIL


def test_search_injects_published_vector():
    board = search(6, budget=4)
    labels = [c.label for c in board.candidates]
    assert "published" in labels
    top = board.candidates[0]
    assert top.label == "published" and top.efficiency == ref.EFFICIENCY
    assert board.hypothetical_limit == 2


def test_search_degree_zero_single_candidate():
    board = search(0)
    assert len(board.candidates) == 1
    assert board.candidates[0].fit_coefficients == (Fraction(3, 4),)


def test_search_budget_flags_partial():
    assert search(2, budget=1).partial
