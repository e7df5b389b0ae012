"""
Suites de vérification : chaque suite exécute les identités et propriétés
d'un module et produit un rapport lisible par machine
"""

import math
import time
from typing import Callable, Optional

import numpy as np
from scipy.integrate import dblquad

from app.core import depfun, frailty, higher, levy, minid
from app.core.exceptions import HazdepError, StructuralError
from app.core.lattice import exponent_of_parts, factorize, mixed_partial_log, recompose
from app.core.logging import get_logger
from app.models.chisq import GaussianCovariance, TrivariateChiSqParams
from app.models.depfun import MarginalSpec, exponential, lomax, weibull
from app.models.lattice import GridSpec, IndexSet
from app.models.levy import LevyAtom, LevyTriplet
from app.models.minid import DiscreteExponentMeasure, MinIdAtom
from app.models.score import PolynomialFactor, ScoreFunction, ScoreTerm, TransformedScore
from app.repositories.golden import GoldenRepository
from app.schemas.figures import CHISQ_RHO2, FIGURES, FRANK_THETAS
from app.schemas.grid import SUITES, CheckResult, VerificationReport
from app.services.catalog import CatalogService
from app.services.grid_service import GridService

logger = get_logger("verification")

Check = Callable[[], CheckResult]

_REGISTRY: dict[str, list[tuple[str, Check]]] = {suite: [] for suite in SUITES}


def check(suite: str, name: str):
    def register(fn: Check) -> Check:
        _REGISTRY[suite].append((name, fn))
        return fn
    return register


def _within(name: str, error: float, tolerance: float, detail: str = "") -> CheckResult:
    error = float(error)
    return CheckResult(
        name=name, passed=bool(error <= tolerance), value=error, tolerance=tolerance, detail=detail
    )


def _holds(name: str, condition: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=bool(condition), detail=detail)


# ==================== JEUX DE DONNÉES ====================

def chisq_sigma(rho12: float, rho13: float, rho23: float) -> tuple:
    return ((1.0, rho12, rho13), (rho12, 1.0, rho23), (rho13, rho23, 1.0))


def random_triplet(rng: np.random.Generator, d: int, atoms: int) -> LevyTriplet:
    return LevyTriplet(
        b=tuple(rng.uniform(0.1, 1.0, d)),
        atoms=tuple(
            LevyAtom(c=float(rng.uniform(0.05, 1.0)), x=tuple(rng.uniform(0.05, 2.0, d)))
            for _ in range(atoms)
        ),
    )


def random_measure(rng: np.random.Generator, d: int, atoms: int, boundary: bool = False) -> DiscreteExponentMeasure:
    """Atomes sur la grille {0.1, ..., 1}^d, certaines coordonnées posées à 1"""
    out = []
    while len(out) < atoms:
        p = np.ceil(rng.uniform(0.0, 1.0, d) * 10) / 10
        p[rng.uniform(size=d) < 0.3] = 1.0
        if np.all(p == 1.0):
            continue
        out.append(MinIdAtom(w=float(rng.uniform(0.05, 1.0)), p=tuple(float(v) for v in p)))
    return DiscreteExponentMeasure(d=d, atoms=tuple(out), uniform_margin_boundary=boundary)


THREE_ATOMS = DiscreteExponentMeasure(
    d=2,
    atoms=(
        MinIdAtom(w=0.4, p=(0.3, 1.0)),
        MinIdAtom(w=0.5, p=(1.0, 0.6)),
        MinIdAtom(w=0.2, p=(0.5, 0.5)),
    ),
)


def product_score(d: int, coef: float = 1.0) -> ScoreFunction:
    """g(x) = coef ∏(2x_i - 1)"""
    return ScoreFunction((ScoreTerm(coef, tuple(PolynomialFactor(1) for _ in range(d))),))


# ==================== LATTICE ====================

@check("lattice", "moebius_roundtrip")
def _moebius_roundtrip() -> CheckResult:
    models = [
        frailty.clayton(3),
        frailty.invgauss(1.0, 2),
        frailty.shared_gamma(2.0, 3),
        frailty.degenerate(3),
        frailty.chisq3(TrivariateChiSqParams(sigma=chisq_sigma(0.5, 0.3, 0.2))),
        levy.levy_model(LevyTriplet(b=(0.5, 0.5), atoms=(LevyAtom(c=0.3, x=(1.0, 2.0)),))),
    ]
    worst = 0.0
    for model in models:
        grid = GridSpec.uniform(model.d, 11, 2.0)
        J = IndexSet.full(model.d)
        oracle = model.oracle()
        rebuilt = recompose(factorize(oracle, J, grid), J)
        direct = oracle(grid.points()).reshape(grid.shape)
        worst = max(worst, float(np.max(np.abs(rebuilt - direct))))
    return _within("moebius_roundtrip", worst, 1e-12, f"{len(models)} modèles, grilles 11^d")


@check("lattice", "clayton_exponent")
def _clayton_exponent() -> CheckResult:
    axis = np.array([0.5, 1.0])
    parts = factorize(frailty.clayton(2).oracle(), IndexSet.full(2), GridSpec((axis, axis)))
    value = exponent_of_parts(parts).exponent(IndexSet.full(2))[1, 1]
    return _within("clayton_exponent", abs(value - math.log(4 / 3)), 1e-10, "Λ_{1,2}(1,1) = log(4/3)")


@check("lattice", "clayton_fd_corner")
def _clayton_fd_corner() -> CheckResult:
    t = 1e-6
    value = mixed_partial_log(frailty.clayton(2), IndexSet.full(2), (t, t))
    return _within("clayton_fd_corner", abs(value - 1.0 / (1 + 2 * t) ** 2), 1e-5, "λ_{1,2}(0⁺,0⁺) = 1")


@check("lattice", "independence_fd")
def _independence_fd() -> CheckResult:
    value = mixed_partial_log(frailty.degenerate(3), IndexSet.full(3), (0.5, 0.7, 0.9))
    return _within("independence_fd", abs(value), 1e-8, "λ_{1,2,3} = 0")


@check("lattice", "compound_poisson_fd")
def _compound_poisson_fd() -> CheckResult:
    model = levy.levy_model(LevyTriplet(b=(0.5, 0.5), atoms=(LevyAtom(c=0.3, x=(1.0, 2.0)),)))
    value = mixed_partial_log(model, IndexSet.full(2), (0.1, 0.1))
    return _within("compound_poisson_fd", abs(value - 0.6 * math.exp(-0.3)), 1e-6)


# ==================== FRAILTY ====================

@check("frailty", "chisq3_factorization")
def _chisq3_factorization() -> CheckResult:
    p = TrivariateChiSqParams(sigma=chisq_sigma(0.5, 0.4, 0.3))
    worst = 0.0
    for x in ((0.3, 0.7, 1.1), (0.1, 0.1, 0.1), (2.0, 0.5, 1.0)):
        parts = frailty.chisq3_parts(p, x)
        product = math.prod(parts.S_i) * math.prod(parts.S_dep_pair.values()) * parts.S_dep_triple
        worst = max(worst, abs(product - parts.S))
    return _within("chisq3_factorization", worst, 1e-12, "S = ∏S_i ∏S_ij S_123")


@check("frailty", "chisq3_triple_vanishes")
def _chisq3_triple_vanishes() -> CheckResult:
    p = TrivariateChiSqParams(sigma=chisq_sigma(0.0, 0.0, 0.6))
    worst = max(
        abs(frailty.chisq3_parts(p, x).S_dep_triple - 1.0)
        for x in ((0.3, 0.7, 1.1), (1.0, 1.0, 1.0), (5.0, 0.1, 2.0))
    )
    return _within("chisq3_triple_vanishes", worst, 1e-12, "ρ₁₂ = ρ₁₃ = 0 ⇒ S_123 ≡ 1")


@check("frailty", "chisq3_monte_carlo")
def _chisq3_monte_carlo() -> CheckResult:
    p = TrivariateChiSqParams(sigma=chisq_sigma(0.5, 0.4, 0.3))
    n = 200_000
    draws = frailty.sample_lifetimes(frailty.chisq3(p), n, seed=11)
    worst = 0.0
    for t in ((0.5, 0.5, 0.5), (1.0, 1.0, 1.0), (0.2, 1.0, 2.0), (1.5, 0.3, 0.3), (0.1, 0.1, 3.0)):
        expected = frailty.chisq3_survival(p, t)
        empirical = float(np.mean(np.all(draws > np.asarray(t), axis=1)))
        bound = 3 * math.sqrt(expected * (1 - expected) / n)
        worst = max(worst, abs(empirical - expected) / bound)
    return _within("chisq3_monte_carlo", worst, 1.0, "écart rapporté à 3·CLT, 5 points")


@check("frailty", "chisq_corner_covariance")
def _chisq_corner_covariance() -> CheckResult:
    model = frailty.chisq(GaussianCovariance(sigma=((1.0, 0.5), (0.5, 1.0))))
    estimate = frailty.cov_lambda_ij(model, 1, 2, (0.0, 0.0), n=200_000, seed=3)
    analytic = frailty.lambda_I(model, IndexSet.full(2), (0.0, 0.0))
    error = abs(estimate.estimate - analytic)
    return _within(
        "chisq_corner_covariance", error, max(1e-5, 3 * estimate.stderr),
        f"λ_12(0,0) = 2σ₁₂² = {analytic:.6g}, estimation {estimate.estimate:.6g}",
    )


@check("frailty", "covariance_vs_fd")
def _covariance_vs_fd() -> CheckResult:
    models = [
        frailty.clayton(2),
        frailty.chisq(GaussianCovariance(sigma=((1.0, 0.5), (0.5, 1.0)))),
        levy.levy_model(LevyTriplet(b=(0.5, 0.5), atoms=(LevyAtom(c=0.3, x=(1.0, 2.0)),))),
    ]
    worst = 0.0
    for model in models:
        for k, t in enumerate(((0.1, 0.1), (0.5, 0.2), (1.0, 1.0), (0.3, 0.8), (2.0, 0.5))):
            estimate = frailty.cov_lambda_ij(model, 1, 2, t, n=100_000, seed=100 + k)
            fd = mixed_partial_log(model, IndexSet.full(2), t)
            worst = max(worst, abs(estimate.estimate - fd) / max(1e-5, 3 * estimate.stderr))
    return _within("covariance_vs_fd", worst, 1.0, "écart rapporté à max(1e-5, 3·stderr)")


@check("frailty", "clayton_sampler")
def _clayton_sampler() -> CheckResult:
    n = 200_000
    draws = frailty.sample_lifetimes(frailty.clayton(2), n, seed=7)
    empirical = float(np.mean(np.all(draws > 1.0, axis=1)))
    expected = 1 / 3
    return _within(
        "clayton_sampler", abs(empirical - expected),
        3 * math.sqrt(expected * (1 - expected) / n), "P(T > (1,1)) = 1/3",
    )


@check("frailty", "min_combine")
def _min_combine() -> CheckResult:
    combined = frailty.min_combine(frailty.clayton(2), frailty.clayton(2))
    points = np.array([[0.5, 0.7], [1.0, 2.0], [0.0, 3.0]])
    error = np.max(np.abs(combined.psi(points) - frailty.shared_gamma(2.0, 2).psi(points)))
    return _within("min_combine", error, 1e-12, "Clayton ⊕ Clayton = Gamma(2) partagée")


@check("frailty", "clayton_density")
def _clayton_density() -> CheckResult:
    value = frailty.density(frailty.clayton(2), (1.0, 1.0))
    return _within("clayton_density", abs(value - 2 / 27), 1e-10)


@check("frailty", "tilted_marginal_hazard")
def _tilted_marginal_hazard() -> CheckResult:
    estimate = frailty.marginal_hazard_rate_tilted(frailty.clayton(2), 1, 0.5, n=100_000, seed=5)
    error = abs(estimate.estimate - 1 / 1.5)
    return _within(
        "tilted_marginal_hazard", error, 4 * estimate.stderr,
        f"λ_1(0.5) = 1/(1+t), estimation {estimate.estimate:.6g}",
    )


@check("frailty", "lognormal_cumulants")
def _lognormal_cumulants() -> CheckResult:
    model = frailty.lognormal(GaussianCovariance(sigma=((1.0, 0.3), (0.3, 1.0))))
    pair = IndexSet.full(2)
    corner = abs(frailty.lambda_I(model, pair, (0.0, 0.0)) - math.exp(1.0) * math.expm1(0.3))
    marginal = abs(frailty.marginal_hazard_rate(model, 1, 0.0) - math.exp(0.5))
    fd = max(
        abs(frailty.lambda_I(model, I, t) - mixed_partial_log(model, I, t))
        for t in ((0.1, 0.2), (0.4, 0.9), (1.5, 0.3))
        for I in pair.subsets()
    )
    return _within(
        "lognormal_cumulants", max(corner, marginal, fd), 1e-6,
        "λ_12(0,0) = e^{(σ₁²+σ₂²)/2}(e^{σ₁₂}-1), λ_1(0) = e^{σ²/2}, analytique vs FD",
    )


@check("frailty", "density_box_mass")
def _density_box_mass() -> CheckResult:
    worst = 0.0
    high = 60.0
    for model, low in ((frailty.clayton(2), 0.0), (frailty.invgauss(1.0, 2), 0.5)):
        mass, _ = dblquad(lambda y, x: frailty.density(model, (x, y)), low, high, low, high)
        expected = (
            frailty.survival(model, (low, low))
            - frailty.survival(model, (high, low))
            - frailty.survival(model, (low, high))
            + frailty.survival(model, (high, high))
        )
        worst = max(worst, abs(mass - expected))
    return _within("density_box_mass", worst, 1e-3, "∫ f sur [a, 60]² = masse du pavé")


# ==================== LEVY ====================

@check("levy", "lambda_route_equivalence")
def _lambda_routes() -> CheckResult:
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(4):
        d = int(rng.integers(2, 4))
        tr = random_triplet(rng, d, int(rng.integers(1, 11)))
        model = levy.levy_model(tr)
        t = rng.uniform(0.1, 1.0, d)
        for I in IndexSet.full(d).subsets():
            fd = mixed_partial_log(model, I, t)
            worst = max(worst, abs(levy.lambda_levy(tr, I, t) - fd))
    return _within("lambda_route_equivalence", worst, 1e-6, "λ_I analytique vs différences finies")


@check("levy", "Lambda_route_equivalence")
def _Lambda_routes() -> CheckResult:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(3):
        tr = random_triplet(rng, 2, int(rng.integers(1, 11)))
        grid = GridSpec.uniform(2, 21, 2.0)
        I = IndexSet.full(2)
        factored = exponent_of_parts(factorize(levy.levy_model(tr).oracle(), I, grid)).exponent(I)
        closed = np.asarray(levy.Lambda_levy(tr, I, grid.points())).reshape(grid.shape)
        worst = max(worst, float(np.max(np.abs(factored - closed))))
    return _within("Lambda_route_equivalence", worst, 1e-8, "Λ_I produit vs factorisation, 21²")


@check("levy", "nth_root")
def _nth_root() -> CheckResult:
    rng = np.random.default_rng(5)
    tr = random_triplet(rng, 3, 6)
    t = rng.uniform(0.0, 2.0, (20, 3))
    worst = 0.0
    for n in (2, 3, 7):
        scaled = np.asarray(levy.exponent_mass(levy.scaled(tr, n), t)) * n
        direct = np.asarray(levy.exponent_mass(tr, t))
        worst = max(worst, float(np.max(np.abs(scaled - direct) / np.maximum(1.0, direct))))
    return _within("nth_root", worst, 1e-14, "ψ^{1/n} = ψ du triplet (b/n, c/n)")


@check("levy", "positivity")
def _positivity() -> CheckResult:
    atom = (LevyAtom(c=0.3, x=(1.0, 2.0)),)
    rejected = levy.validate_positivity(LevyTriplet(b=(0.0, 1.0), atoms=atom))
    accepted = levy.validate_positivity(LevyTriplet(b=(1e-9, 1.0), atoms=atom))
    return _holds("positivity", not rejected.ok and rejected.offending == (1,) and accepted.ok)


@check("levy", "minid_encoding")
def _minid_encoding() -> CheckResult:
    tr = LevyTriplet(b=(0.5, 1.5, 2.0))
    measure, rates = levy.drift_exponent_measure(tr)
    t = np.random.default_rng(3).uniform(0.0, 2.0, (25, 3))
    from_minid = minid.survival_from_mu(measure, -np.expm1(-rates * t))
    from_levy = np.exp(-np.asarray(levy.exponent_mass(tr, t)))
    return _within("minid_encoding", np.max(np.abs(from_minid - from_levy)), 1e-14)


# ==================== MINID ====================

@check("minid", "three_atom_example")
def _three_atom_example() -> CheckResult:
    x = (0.4, 0.4)
    direct = minid.survival_from_mu(THREE_ATOMS, x)
    expected = math.exp(-0.4)
    lam = exponent_of_parts(
        factorize(minid.exponent_measure_oracle(THREE_ATOMS), IndexSet.full(2), GridSpec((np.array([0.0, 0.6]),) * 2, "unit"))
    ).exponent(IndexSet.full(2))[1, 1]
    error = max(abs(direct - expected), abs(minid.survival_incl_excl(THREE_ATOMS, x) - expected), abs(lam - 0.2))
    return _within("three_atom_example", error, 1e-14, "S(0.4,0.4) = e^{-0.4}, Λ_12 = 0.2")


@check("minid", "identification")
def _identification() -> CheckResult:
    rng = np.random.default_rng(31)
    worst = 0.0
    for k in range(6):
        d = 2 + k % 3
        mu = random_measure(rng, d, int(rng.integers(1, 21)), boundary=bool(k % 2))
        grid = GridSpec.unit_cube(d, 6)
        for I in IndexSet.full(d).subsets():
            worst = max(worst, minid.identify_Lambda(mu, I, grid))
    return _within("identification", worst, 1e-10, "Λ_I = μ_I sur [0,1)^{|I|}")


@check("minid", "survival_routes")
def _survival_routes() -> CheckResult:
    rng = np.random.default_rng(13)
    worst = 0.0
    for d in (2, 3, 4):
        mu = random_measure(rng, d, 10)
        x = rng.uniform(0.0, 0.999, (100, d))
        worst = max(worst, float(np.max(np.abs(minid.survival_from_mu(mu, x) - minid.survival_incl_excl(mu, x)))))
    return _within("survival_routes", worst, 1e-14, "survie directe vs inclusion-exclusion")


@check("minid", "pairwise_implication")
def _pairwise_implication() -> CheckResult:
    rng = np.random.default_rng(17)
    reports = [minid.independence_report(random_measure(rng, 3, int(rng.integers(1, 8)))) for _ in range(20)]
    face_only = DiscreteExponentMeasure(
        d=3, atoms=(MinIdAtom(w=0.5, p=(0.2, 1.0, 1.0)), MinIdAtom(w=0.3, p=(1.0, 1.0, 0.4))),
        uniform_margin_boundary=True,
    )
    reports.append(minid.independence_report(face_only))
    return _holds("pairwise_implication", all(r.implication_holds for r in reports) and reports[-1].all_zero)


@check("minid", "nth_root_survival")
def _nth_root_survival() -> CheckResult:
    mu = random_measure(np.random.default_rng(19), 2, 8, boundary=True)
    return _holds("nth_root_survival", all(minid.root_is_survival(mu, n) for n in (1, 2, 5)))


# ==================== DEPFUN ====================

def _fd_models():
    models = [("clayton", frailty.clayton(2), (1, 2))]
    models += [(f"frank θ={theta:g}", depfun.frank_model(theta), (1, 2)) for theta in FRANK_THETAS]
    models.append(("invgauss", frailty.invgauss(1.0, 2), (1, 2)))
    models += [
        (f"chisq3 ρ²={rho2:g}", frailty.chisq3(TrivariateChiSqParams(sigma=chisq_sigma(math.sqrt(rho2), 0.0, 0.0))), (1, 2))
        for rho2 in CHISQ_RHO2
    ]
    models.append(("prop β=1", depfun.prop_model(1.0), (1, 2)))
    return models


@check("depfun", "catalog_vs_fd")
def _catalog_vs_fd() -> CheckResult:
    axis = np.linspace(0.05, 0.95, 21)
    u = np.stack([m.ravel() for m in np.meshgrid(axis, axis, indexing="ij")], axis=-1)
    worst, where = 0.0, ""
    for label, model, pair in _fd_models():
        I = IndexSet.of(model.d, *pair)
        closed = depfun.gamma_0I(model, None, u, I, route="closed-form")
        fd = depfun.gamma_0I(model, None, u, I, route="fd")
        error = float(np.max(np.abs(closed - fd)))
        if error > worst:
            worst, where = error, label
    return _within("catalog_vs_fd", worst, 1e-4, f"pire modèle : {where}")


@check("depfun", "clayton_values")
def _clayton_values() -> CheckResult:
    model = frailty.clayton(2)
    error = max(
        abs(depfun.gamma_0I(model, None, (0.5, 0.5)) - 4 / 9),
        abs(depfun.gamma_0I(model, None, (0.0, 0.0)) - 1.0),
        abs(depfun.exp_margin_gamma(model, IndexSet.full(2), (math.log(2), math.log(2))) - 4 / 9),
    )
    return _within("clayton_values", error, 1e-10)


@check("depfun", "invgauss_theta_invariance")
def _invgauss_invariance() -> CheckResult:
    grids = [depfun.gamma_grid(frailty.invgauss(theta, 2), resolution=21).values for theta in (0.5, 1.0, 3.0)]
    finite = ~np.isnan(grids[0])
    error = max(float(np.max(np.abs(g[finite] - grids[0][finite]))) for g in grids)
    return _within("invgauss_theta_invariance", error, 1e-10)


@check("depfun", "chisq_corner")
def _chisq_corner() -> CheckResult:
    error = 0.0
    for rho2 in CHISQ_RHO2:
        model = frailty.chisq3(TrivariateChiSqParams(sigma=chisq_sigma(math.sqrt(rho2), 0.0, 0.0)))
        error = max(error, abs(depfun.gamma_0I(model, None, (0.0, 0.0), IndexSet.of(3, 1, 2)) - 2 * rho2))
    return _within("chisq_corner", error, 1e-10, "γ₀(0,0) = 2ρ²")


@check("depfun", "chisq_scale_invariance")
def _chisq_scale_invariance() -> CheckResult:
    rho = np.array([[1.0, 0.5, 0.4], [0.5, 1.0, 0.3], [0.4, 0.3, 1.0]])
    models = [
        frailty.chisq3(TrivariateChiSqParams(sigma=tuple(map(tuple, (rho * np.outer(s, s)).tolist()))))
        for s in ((1.0, 1.0, 1.0), (2.0, 0.5, 1.5))
    ]
    u = np.array([[0.05, 0.1], [0.3, 0.7], [0.9, 0.2]])
    error = 0.0
    for pair in ((1, 2), (1, 3), (2, 3)):
        I = IndexSet.of(3, *pair)
        unit, scaled = (depfun.gamma_0I(m, None, u, I, route="analytic") for m in models)
        error = max(error, float(np.max(np.abs(unit - scaled))))
    return _within("chisq_scale_invariance", error, 1e-8, "γ₀ ne dépend que des ρ_ij")


@check("depfun", "prop_constant")
def _prop_constant() -> CheckResult:
    grid = depfun.gamma_grid(depfun.prop_model(0.7), resolution=21)
    return _holds("prop_constant", bool(np.all(grid.values == -0.7)), "γ₀ ≡ -β")


@check("depfun", "marginal_invariance")
def _marginal_invariance() -> CheckResult:
    base = frailty.clayton(2)
    u = np.random.default_rng(23).uniform(0.05, 0.9, (20, 2))
    closed = depfun.gamma_0I(base, None, u, route="closed-form")
    worst = 0.0
    for target in (MarginalSpec.repeat(weibull(2.0, 1.5), 2), MarginalSpec((lomax(3.0, 2.0), exponential(0.5)))):
        moved = depfun.gamma_0I(depfun.remarginalize(base, target), None, u, route="analytic")
        worst = max(worst, float(np.max(np.abs(moved - closed))))
    return _within("marginal_invariance", worst, 1e-6, "γ₀ invariant par changement de marginales")


@check("depfun", "multi_prop_higher_orders")
def _multi_prop_higher_orders() -> CheckResult:
    pairs = {(1, 2): 0.25, (1, 3): 0.25, (2, 3): 0.25}
    model = depfun.multi_prop_model(pairs, 3)
    J = IndexSet.full(3)
    lam = exponent_of_parts(factorize(model.oracle(), J, GridSpec.uniform(3, 11, 2.0))).exponent(J)
    return _within("multi_prop_higher_orders", float(np.max(np.abs(lam))), 1e-8, "Λ_123 ≡ 0")


@check("depfun", "survival_copula")
def _survival_copula() -> CheckResult:
    model = frailty.clayton(2)
    error = max(
        abs(depfun.copula_scale_survival(model, model.marginals, (0.5, 0.5)) - 1 / 3),
        abs(depfun.prop_survival(MarginalSpec.repeat(exponential(), 2), 0.5, (1.0, 1.0)) - math.exp(-2.5)),
    )
    return _within("survival_copula", error, 1e-10)


# ==================== HIGHER ====================

@check("higher", "R_pointwise")
def _R_pointwise() -> CheckResult:
    x = np.linspace(0.01, 0.99, 99)
    error = np.max(np.abs(higher.R_univ(PolynomialFactor(1), x) - (x - 1)))
    return _within("R_pointwise", error, 1e-12, "R(2x-1) = x-1")


@check("higher", "isometry")
def _isometry() -> CheckResult:
    d2 = ScoreFunction((
        ScoreTerm(1.0, (PolynomialFactor(1), PolynomialFactor(3))),
        ScoreTerm(0.5, (PolynomialFactor(5), PolynomialFactor(1))),
    ))
    error2 = higher.isometry_defect(d2)
    error3 = higher.isometry_defect(product_score(3), nodes=301)
    return _holds("isometry", error2 <= 1e-6 and error3 <= 1e-4, f"d=2 : {error2:.2e}, d=3 : {error3:.2e}")


@check("higher", "dependence_part_identity")
def _dependence_part_identity() -> CheckResult:
    g = product_score(2)
    x = np.array([[0.5, 0.5], [0.2, 0.7], [0.9, 0.1]])
    expected = 1 + x[:, 0] * x[:, 1]
    by_gamma = higher.S_dep_from_gamma(TransformedScore(g), x)
    by_score = higher.S_dep_from_score(g, x)
    by_copula = higher.copula_family(g, 1.0).dependence_part(x)
    error = max(
        float(np.max(np.abs(by_gamma - expected))),
        float(np.max(np.abs(by_score - expected))),
        float(np.max(np.abs(by_copula - expected))),
    )
    return _within("dependence_part_identity", error, 1e-8, "S_{I₀}(x) = 1 + x₁x₂")


@check("higher", "proper_marginals_independent")
def _proper_marginals() -> CheckResult:
    copula = higher.copula_family(product_score(3), 1.0)
    J = IndexSet.full(3)
    table = exponent_of_parts(factorize(copula.oracle(), J, GridSpec.unit_cube(3, 11)))
    pairs = max(float(np.max(np.abs(table.exponent(I)))) for I in J.subsets() if I.size == 2)
    triple = float(np.max(np.abs(table.exponent(J))))
    return _holds(
        "proper_marginals_independent", pairs <= 1e-8 and triple > 1e-3,
        f"max |Λ_ij| = {pairs:.2e}, max |Λ_123| = {triple:.3g}",
    )


@check("higher", "conditions")
def _conditions() -> CheckResult:
    fgm = higher.check_conditions(lambda x: 1 + 0.5 * (2 * x[:, 0] - 1) * (2 * x[:, 1] - 1), d=2)
    skewed = higher.check_conditions(lambda x: 1 + 0.5 * (2 * x[:, 0] - 1), d=2)
    return _holds("conditions", fgm.holds and not skewed.holds)


@check("higher", "first_order_remainder")
def _first_order_remainder() -> CheckResult:
    g = product_score(2)
    x = np.array([[0.2, 0.3], [0.5, 0.5], [0.9, 0.8]])
    sizes = [float(np.max(np.abs(higher.first_order_remainder(g, theta, x)))) for theta in (0.1, 0.05, 0.025)]
    return _holds(
        "first_order_remainder", sizes[0] > sizes[1] > sizes[2],
        "reste / θ : " + ", ".join(f"{s:.3e}" for s in sizes),
    )


# ==================== FIGURES ====================

def figure_checks(goldens: GoldenRepository, grids: GridService, catalog: CatalogService) -> list[CheckResult]:
    out = []
    for figure in FIGURES:
        model = catalog.build(figure.spec)
        table = grids.gamma_table(model, pair=figure.pair, resolution=figure.resolution, delta=figure.delta)
        comparison = goldens.compare_figure(figure, table)
        detail = ""
        if comparison.mismatched_headers:
            detail = "en-têtes divergents : " + ", ".join(comparison.mismatched_headers)
        elif not comparison.mask_agrees:
            detail = "nœuds masqués divergents"
        out.append(CheckResult(
            name=figure.name, passed=comparison.passed, value=comparison.max_abs_error,
            tolerance=comparison.tolerance, detail=detail,
        ))
    return out


class VerificationService:
    def __init__(
        self,
        goldens: Optional[GoldenRepository] = None,
        grids: Optional[GridService] = None,
        catalog: Optional[CatalogService] = None,
    ):
        self.goldens = goldens or GoldenRepository()
        self.grids = grids or GridService()
        self.catalog = catalog or CatalogService()

    def _suite_checks(self, suite: str) -> list[CheckResult]:
        if suite == "figures":
            try:
                return figure_checks(self.goldens, self.grids, self.catalog)
            except HazdepError as exc:
                return [CheckResult(name="figures", passed=False, detail=exc.detail)]
        out = []
        for name, fn in _REGISTRY[suite]:
            try:
                out.append(fn())
            except HazdepError as exc:
                out.append(CheckResult(name=name, passed=False, detail=f"{type(exc).__name__} : {exc.detail}"))
        return out

    def run(self, suite: str) -> VerificationReport:
        """
        Exécute une suite (ou toutes avec "all")

        Raises:
            StructuralError: si la suite est inconnue
        """
        if suite != "all" and suite not in SUITES:
            raise StructuralError(f"Suite inconnue : {suite}", suites=[*SUITES, "all"])
        start = time.perf_counter()
        if suite == "all":
            checks = [
                c.model_copy(update={"name": f"{name}.{c.name}"})
                for name in SUITES
                for c in self._suite_checks(name)
            ]
        else:
            checks = self._suite_checks(suite)
        report = VerificationReport(
            suite=suite,
            passed=all(c.passed for c in checks),
            duration_s=round(time.perf_counter() - start, 3),
            checks=checks,
        )
        logger.info(
            "suite %s : %d/%d vérifications réussies (%.1f s)",
            suite, len(checks) - len(report.failures), len(checks), report.duration_s,
        )
        return report
