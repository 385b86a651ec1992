from fractions import Fraction as F

from dsres import appendix
from dsres.lie import AlgebraSpec
from dsres.topo import solve_regular
from dsres.verify import appendix_report

T = F(1, 3)


def test_gamma_ratio():
    assert appendix.gamma_ratio(T, 2) == T * (T + 1)
    assert appendix.gamma_ratio(F(4, 3), -1) == 3
    assert appendix.gamma_ratio(F(5, 7), 0) == 1


def test_family_leading_term_is_prefactor():
    for fams in appendix.APPENDIX_A[1].values():
        for pref, alpha, beta, c, s in fams:
            if alpha == beta:
                assert appendix.family_coefficient(pref, alpha, beta, 0, s) == pref


def ours():
    spec = AlgebraSpec(2)
    return {a: solve_regular(spec, a, F(-60)).series for a in (1, 2)}


def test_frame_and_corrected_reading():
    sols = ours()
    printed = {a: appendix.appendix_matrix_terms(a, 2) for a in (1, 2)}
    frame, mism = appendix.fit_frame(sols, printed, 3, 2)
    assert frame is not None
    assert (frame.transpose, frame.c, frame.s) == (False, -1, 1)
    assert mism
    corrected = {a: appendix.corrected_matrix_terms(a, 2) for a in (1, 2)}
    assert appendix.compare(sols, corrected, frame, 2) == []


def test_report_lists_every_family():
    checks, lines = appendix_report()
    assert all(c.ok for c in checks)
    fams = [x for x in lines if x.startswith("  (M_")]
    assert len(fams) == 18
    assert "  (M_1)^1_3: match" in fams
