"""Named verification suites.

Each suite returns a list of :class:`VerificationReport`; ``run_suite("all")``
concatenates them in canonical order.
"""
from __future__ import annotations

import inspect
import time
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from jacobi0.analysis import (
    ContourError,
    TorusContour,
    count_zeros,
    delta_coefficients,
    embed_g,
    legendre_check,
    pairing_expected,
)
from jacobi0.jacobi import (
    DEFAULT_MATRICES,
    DEFAULT_TAUS,
    DEFAULT_ZS,
    S,
    T,
    ExceedsWindow,
    VerificationReport,
    coeff_relation_check,
    compare,
    constant_form,
    filtration_index,
    grid,
    sigma_form,
    slash_dprime,
    slash_prime,
    verify_cocycles,
)
from jacobi0.klein import (
    GAMMA8_WITNESSES,
    CongruenceCondition,
    check_phix_modularity,
    klein_eval,
    klein_qexp,
    subgroup_member,
    translation_ratio,
)
from jacobi0.qseries import qs_ord
from jacobi0.weierstrass import RationalPair, sigma_eval, sigma_series

R = RationalPair

# Reference rows of the normalized sigma series through q^5; row 4 is the
# brute-force product value 3/zeta^2 - 22/zeta + 51 - 51 zeta + 22 zeta^2 - 3 zeta^3.
SIGMA_TABLE = {
    0: {0: 1, 1: -1},
    1: {-1: -1, 0: 3, 1: -3, 2: 1},
    2: {-1: -3, 0: 9, 1: -9, 2: 3},
    3: {-2: 1, -1: -9, 0: 22, 1: -22, 2: 9, 3: -1},
    4: {-2: 3, -1: -22, 0: 51, 1: -51, 2: 22, 3: -3},
    5: {-2: 9, -1: -51, 0: 108, 1: -108, 2: 51, 3: -9},
}

KLEIN_FIXTURES = (R("1/2", 0), R(0, "1/2"), R("1/2", "1/2"), R("1/3", "1/3"), R("1/5", "2/5"))
TRANSLATION_FIXTURES = ((R("1/2", 0), R("3/2", 0)), (R(0, "1/2"), R(0, "3/2")), (R("1/3", "1/4"), R("-2/3", "9/4")))
COCYCLE_PAIRS = ((R("1/2", 0), R(0, "1/3")), (R(1, 0), R(0, 1)), (R("1/3", "2/5"), R("-1/2", "1/7")),
                 (R(2, -1), R(1, 3)))
COCYCLE_XS = (R("1/2", "1/2"), R("1/3", 0), R("-2/5", "3/7"))
EMBED_INDICES = (R("1/2", "1/2"), R("1/3", "2/3"))


def control_function(tau, z):
    """``exp(z) e(tau)``: smooth, not a modified Jacobi form."""
    return np.exp(np.asarray(z, dtype=complex)) * np.exp(2j * np.pi * tau)


def _exact(identity: str, mismatch: float, samples: int, **details) -> VerificationReport:
    return VerificationReport(identity, float(mismatch), samples, 0.0, exact=True, details=details)


def suite_expansion(tol=None) -> list[VerificationReport]:
    S5 = sigma_series(5)
    mism = 0
    n = 0
    for row, entries in SIGMA_TABLE.items():
        got = {r: int(c) for r, c in S5.row(row).items()}
        n += 1
        if got != entries:
            mism += 1
    return [_exact("expansion[sigma,N=5]", mism, n)]


def suite_legendre(tol=None, taus: Sequence[complex] = DEFAULT_TAUS) -> list[VerificationReport]:
    tol = tol or 1e-9
    devs = [legendre_check(t) for t in taus]
    return [VerificationReport("legendre", max(devs), len(devs), tol)]


def suite_sigma_transform(tol=None, taus=DEFAULT_TAUS, zs=DEFAULT_ZS) -> list[VerificationReport]:
    tol = tol or 1e-8
    pts = grid(taus, zs)
    out = []
    for name, M in (("S", S), ("T", T), ("ST", S @ T)):
        f = slash_prime(sigma_eval, -1, M)
        out.append(compare(f"sigma|'M={name}", ((f(t, z), sigma_eval(t, z)) for t, z in pts), tol, relative=True))
    for X in (R(1, 0), R(0, 1), R(1, 1), R(2, 0)):
        f = slash_dprime(sigma_eval, -1, X)
        out.append(compare(f"sigma|''X=({X})", ((f(t, z), sigma_eval(t, z)) for t, z in pts), tol, relative=True))
    return out


def suite_cocycle(tol=None, taus=DEFAULT_TAUS, zs=DEFAULT_ZS) -> list[VerificationReport]:
    tol = tol or 1e-9
    pts = grid(taus, zs)
    out = []
    for phi, k, label in ((sigma_eval, -1, "sigma"), (control_function, 1, "control"),
                          (control_function, 2, "control"), (control_function, -3, "control")):
        out.extend(verify_cocycles(phi, k, COCYCLE_PAIRS, DEFAULT_MATRICES, COCYCLE_XS, pts, tol, label))
    return out


def suite_coeff_relation(tol=None, trunc: int = 12) -> list[VerificationReport]:
    Sser = sigma_series(trunc)
    out = []
    for series, k, label in ((Sser, -1, "S"), (Sser * Sser, -2, "S^2")):
        rep = coeff_relation_check(series, k, (-2, -1, 1, 2))
        out.append(_exact(f"coeff-relation[{label},k={k}]", len(rep.violations), rep.checked))
    return out


def suite_klein_dual(tol=None, taus=DEFAULT_TAUS, trunc: int = 12) -> list[VerificationReport]:
    tol = tol or 1e-9
    out = []
    for X in KLEIN_FIXTURES:
        series = klein_qexp(X, trunc)
        out.append(compare(f"klein-dual[X=({X})]", ((klein_eval(X, t), series.evaluate(t)) for t in taus), tol))
    o = qs_ord(klein_qexp(R("1/2", 0), trunc))
    out.append(_exact("klein-ord[X=(1/2,0)]=-1/8", 0 if o == Fraction(-1, 8) else 1, 1, ord=str(o)))
    return out


def suite_phix_modularity(tol=None, taus=DEFAULT_TAUS) -> list[VerificationReport]:
    tol = tol or 1e-8
    X = R("1/2", 0)
    sig = sigma_form()
    cond = CongruenceCondition(X, -1)
    members = sum(subgroup_member(cond, M) for M in GAMMA8_WITNESSES)
    out = [_exact("gamma8-witnesses-in-subgroup", len(GAMMA8_WITNESSES) - members, len(GAMMA8_WITNESSES))]
    out.append(check_phix_modularity(sig, X, GAMMA8_WITNESSES, taus, tol))
    for Xa, Xb in TRANSLATION_FIXTURES:
        tr = translation_ratio(sig, Xa, Xb, taus, 1e-9)
        out.append(VerificationReport(f"translation-ratio[({Xa})~({Xb})]", max(tr.grid_deviation, tr.modulus_error),
                                      len(taus), 1e-9, details={"xi": [tr.xi.real, tr.xi.imag], "order": tr.order}))
    return out


def _sigma_power(p: int):
    return lambda tau: (lambda z: sigma_eval(tau, z) ** p)


def suite_zeros(tol=None, taus=(1j, 2j, 0.5 + 1j)) -> list[VerificationReport]:
    out = []
    for p in (1, 2):
        mism = 0
        worst = 0.0
        for tau in taus:
            try:
                rep = count_zeros(_sigma_power(p)(tau), TorusContour(tau))
            except ContourError:
                mism += 1
                continue
            worst = max(worst, rep.residual)
            mism += rep.count != p
        out.append(_exact(f"zeros[sigma^{p}]={p}", mism, len(taus), max_residual=worst))
        out.append(VerificationReport(f"zeros-residual[sigma^{p}]", worst, len(taus), 0.01))
    # opposite sides pair up as the translation law predicts
    tau = 0.5 + 1j
    rep = count_zeros(_sigma_power(1)(tau), TorusContour(tau))
    s13, s24 = pairing_expected(-1, tau)
    seg = rep.segment_integrals
    out.append(compare("zeros-boundary-pairing", [(seg[0] + seg[2], s13), (seg[1] + seg[3], s24)], 1e-6))
    return out


def suite_filtration(tol=None) -> list[VerificationReport]:
    sig = sigma_form()
    cases = ((sig, 2), (constant_form(), 1), (sig * sig, 3))
    out = []
    for phi, want in cases:
        try:
            got = filtration_index(phi)
        except ExceedsWindow:
            got = None
        out.append(_exact(f"filtration[{phi.label}]={want}", 0 if got == want else 1, 1, got=got))
    return out


def suite_embed(tol=None, trunc: int = 12) -> list[VerificationReport]:
    sig = sigma_form(trunc)
    comps = embed_g(sig, EMBED_INDICES, 2)
    ords = [qs_ord(c) for c in comps]
    out = [
        _exact("embed[sigma,m=2]-ord>=0", sum(not (o >= 0) for o in ords), len(ords)),
        _exact("embed[sigma,m=2]-first-ord=15/8", 0 if ords[0] == Fraction(15, 8) else 1, 1,
               ords=[str(o) for o in ords]),
    ]
    want = [0, 1, -24, 252, -1472]
    out.append(_exact("delta-coefficients", sum(a != b for a, b in zip(delta_coefficients(4), want)), 5))
    return out


SUITES: dict[str, Callable[..., list[VerificationReport]]] = {
    "expansion": suite_expansion,
    "legendre": suite_legendre,
    "sigma-transform": suite_sigma_transform,
    "cocycle": suite_cocycle,
    "coeff-relation": suite_coeff_relation,
    "klein-dual": suite_klein_dual,
    "phix-modularity": suite_phix_modularity,
    "zeros": suite_zeros,
    "filtration": suite_filtration,
    "embed": suite_embed,
}


def _call(fn, tol, taus):
    if taus is not None and "taus" in inspect.signature(fn).parameters:
        return fn(tol, taus=tuple(taus))
    return fn(tol)


def run_suite(name: str, tol: float | None = None, taus: Sequence[complex] | None = None) -> list[VerificationReport]:
    """Run one named suite, or every suite for ``"all"``.

    ``taus`` replaces the default tau grid of the suites that sample one.
    """
    if name == "all":
        return [r for key in SUITES for r in _call(SUITES[key], tol, taus)]
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all") from None
    return _call(fn, tol, taus)


def timed(name: str, tol: float | None = None, taus=None) -> tuple[list[VerificationReport], float]:
    t0 = time.perf_counter()
    reps = run_suite(name, tol, taus)
    return reps, time.perf_counter() - t0
