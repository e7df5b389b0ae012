"""
Modèles de fragilité corrélée X_i = Y_i / W_i

La survie jointe coïncide avec la transformée de Laplace ψ de W. Ce module
évalue ψ, la densité, les taux de hasard marginaux, la forme covariance
de λ_{ij} sous la famille exponentielle Q_t, l'échantillonnage et le
catalogue (Clayton, Gamma partagée, inverse gaussienne, χ², log-normale).
"""

import itertools
import math
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp, poch

from app.config.settings import settings
from app.core.exceptions import CapabilityError, DomainError, StructuralError
from app.core.lattice import mixed_partial, mixed_partial_log
from app.core.logging import get_logger
from app.models.chisq import ChiSqParts, GaussianCovariance, TrivariateChiSqParams
from app.models.depfun import ImplicitMarginal, MarginalSpec, exponential, lomax, weibull
from app.models.laplace import CovEstimate, ExpFamilySample, LaplaceModel
from app.models.lattice import IndexSet
from app.models.levy import LevyTriplet
from app.utils.quadrature import gauss_hermite_tensor
from app.utils.rng import draw_blocks

logger = get_logger("frailty")


def _orthant_points(d: int, t, strict: bool = False) -> tuple[np.ndarray, bool]:
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 1
    points = np.atleast_2d(t)
    if points.shape[-1] != d:
        raise StructuralError(f"Point de dimension {points.shape[-1]}, attendu {d}")
    bad = ~np.isfinite(points) | ((points <= 0) if strict else (points < 0))
    if np.any(bad):
        where = points[np.argmax(bad.any(axis=-1))]
        raise DomainError(
            "Coordonnée hors de l'orthant" + (" ouvert" if strict else ""),
            point=where,
        )
    return points, scalar


def _out(values: np.ndarray, scalar: bool):
    values = np.asarray(values, dtype=float)
    return float(values.reshape(-1)[0]) if scalar else values


# ==================== ÉVALUATION ====================

def survival(model: LaplaceModel, t):
    """
    S(t) = ψ(t) = P(X > t)

    Args:
        model: modèle de Laplace
        t: point (d,) ou lot (n, d) de l'orthant positif

    Returns:
        float ou np.ndarray
    """
    points, scalar = _orthant_points(model.d, t)
    return _out(model.psi(points), scalar)


def log_survival(model: LaplaceModel, t):
    points, scalar = _orthant_points(model.d, t)
    return _out(model.oracle().log(points), scalar)


def density(model: LaplaceModel, t):
    """
    f = (-1)^d ∂_1...∂_d ψ, analytique si le modèle la fournit,
    sinon par différences finies sur ψ
    """
    points, scalar = _orthant_points(model.d, t, strict=True)
    if model.analytic_density is not None:
        return _out(model.analytic_density(points), scalar)
    index = IndexSet.full(model.d)
    values = mixed_partial(model.oracle(), index, points, log=False)
    return _out((-1) ** model.d * values, scalar)


def lambda_I(model: LaplaceModel, index: IndexSet, t):
    """
    Densité locale λ_I(t_I), analytique si possible, sinon par
    différences finies de log ψ
    """
    index.require_nonempty()
    points = index.embed(np.atleast_2d(np.asarray(t, dtype=float)))
    scalar = np.asarray(t).ndim == 1
    if model.analytic_lambda is not None:
        try:
            return _out(model.analytic_lambda(index, points), scalar)
        except CapabilityError:
            pass
    return _out(mixed_partial_log(model.oracle(), index, points), scalar)


def marginal_hazard_rate(model: LaplaceModel, i: int, t):
    """
    λ_i(t) = -∂_i log ψ(t e_i)

    La limite en 0⁺ n'est disponible qu'avec une forme analytique.
    """
    index = IndexSet.of(model.d, i)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or (model.analytic_lambda is None and np.any(t <= 0)):
        raise DomainError(f"Temps non admissible pour λ_{i}", t=t)
    values = lambda_I(model, index, t.reshape(-1, 1))
    return float(values[0]) if t.ndim == 0 else np.asarray(values).reshape(t.shape)


# ==================== ÉCHANTILLONNAGE ====================

def sample_frailty(model: LaplaceModel, n: int, seed: int, stream: tuple[int, ...] = (0,)) -> np.ndarray:
    if model.frailty_sampler is None:
        raise CapabilityError(f"Le modèle {model.name} n'a pas d'échantillonneur", model=model.name)
    return draw_blocks(model.frailty_sampler, n, seed, stream)


def sample_lifetimes(model: LaplaceModel, n: int, seed: int, stream: tuple[int, ...] = (0,)) -> np.ndarray:
    """
    Tirages (Y_1/W_1, ..., Y_d/W_d), Y_i exponentielles standard indépendantes de W

    Un modèle issu de min_combine renvoie les minima composante par
    composante de tirages indépendants de ses composants.
    """
    if model.components and all(c.frailty_sampler is not None for c in model.components):
        draws = [
            sample_lifetimes(component, n, seed, (*stream, k + 1))
            for k, component in enumerate(model.components)
        ]
        return np.minimum.reduce(draws)
    if model.frailty_sampler is None:
        raise CapabilityError(f"Le modèle {model.name} n'a pas d'échantillonneur", model=model.name)
    sampler = model.frailty_sampler
    d = model.d

    def block(rng: np.random.Generator, size: int) -> np.ndarray:
        w = sampler(rng, size)
        y = rng.standard_exponential((size, d))
        return y / w

    logger.info("échantillonnage de %d durées (%s, graine %d)", n, model.name, seed)
    return draw_blocks(block, n, seed, stream)


# ==================== FAMILLE EXPONENTIELLE ====================

def tilted_sample(model: LaplaceModel, t, n: int, seed: int) -> ExpFamilySample:
    """
    Tirages de Q_0 repondérés vers Q_t, poids ∝ exp(-<t, w>) auto-normalisés
    """
    tilt = np.asarray(t, dtype=float)
    if tilt.shape != (model.d,) or np.any(tilt < 0):
        raise DomainError("Point d'inclinaison invalide", t=tilt)
    draws = sample_frailty(model, n, seed)
    log_w = -(draws @ tilt)
    log_w -= log_w.max()
    weights = np.exp(log_w)
    weights /= weights.sum()
    return ExpFamilySample(draws=draws, weights=weights, t=tilt, seed=seed)


def _batch_jackknife(weights: np.ndarray, stat: Callable[[np.ndarray], float], batches: int) -> tuple[float, float]:
    """Estimation et erreur type par jackknife à blocs supprimés"""
    full = stat(np.ones_like(weights, dtype=bool))
    groups = np.array_split(np.arange(weights.size), batches)
    estimates = []
    for group in groups:
        keep = np.ones(weights.size, dtype=bool)
        keep[group] = False
        estimates.append(stat(keep))
    estimates = np.asarray(estimates)
    spread = (batches - 1) / batches * np.sum((estimates - estimates.mean()) ** 2)
    return full, float(math.sqrt(spread))


def _tilt_for(model: LaplaceModel, index: IndexSet, t) -> np.ndarray:
    return index.embed(index.take(np.asarray(t, dtype=float)))


def cov_lambda_ij(model: LaplaceModel, i: int, j: int, t, n: int = 200_000, seed: int = 0) -> CovEstimate:
    """
    λ_{ij}(t_i, t_j) = Cov_{Q_{(t_I, 0)}}(W_i, W_j) par échantillonnage
    d'importance auto-normalisé

    Args:
        model: modèle avec échantillonneur de fragilité
        i, j: indices distincts (à partir de 1)
        t: point d'inclinaison (t_i, t_j) ou de dimension d
        n: nombre de tirages (>= 10⁴)
        seed: graine

    Returns:
        CovEstimate: estimation, erreur type jackknife, taille effective
    """
    if i == j:
        raise StructuralError("Les indices i et j doivent être distincts", i=i, j=j)
    if n < 10_000:
        raise DomainError("Au moins 10⁴ tirages requis", n=n)
    index = IndexSet.of(model.d, i, j)
    sample = tilted_sample(model, _tilt_for(model, index, t), n, seed)
    x = sample.draws[:, i - 1]
    y = sample.draws[:, j - 1]
    w = sample.weights
    # centrage global, la covariance est invariante par translation
    xc = x - w @ x
    yc = y - w @ y

    def stat(keep: np.ndarray) -> float:
        wk = w[keep] / w[keep].sum()
        mx = wk @ xc[keep]
        my = wk @ yc[keep]
        return float(wk @ (xc[keep] * yc[keep]) - mx * my)

    estimate, stderr = _batch_jackknife(w, stat, settings.cov_batches)
    ess = sample.effective_size
    degenerate = ess < settings.min_effective_sample_size
    if degenerate:
        logger.warning("poids d'importance dégénérés : taille effective %.1f", ess)
    return CovEstimate(estimate, stderr, ess, degenerate, n, seed)


def marginal_hazard_rate_tilted(model: LaplaceModel, i: int, t: float, n: int = 200_000, seed: int = 0) -> CovEstimate:
    """λ_i(t) = E_{Q_{(t,0)}}(W_i) par échantillonnage d'importance"""
    index = IndexSet.of(model.d, i)
    sample = tilted_sample(model, _tilt_for(model, index, [t]), n, seed)
    x = sample.draws[:, i - 1]
    w = sample.weights

    def stat(keep: np.ndarray) -> float:
        return float(w[keep] @ x[keep] / w[keep].sum())

    estimate, stderr = _batch_jackknife(w, stat, settings.cov_batches)
    ess = sample.effective_size
    return CovEstimate(estimate, stderr, ess, ess < settings.min_effective_sample_size, n, seed)


# ==================== MINIMUM ====================

def _log_psi(model: LaplaceModel) -> Callable[[np.ndarray], np.ndarray]:
    return model.oracle().log


def min_combine(m1: LaplaceModel, m2: LaplaceModel) -> LaplaceModel:
    """
    Minimum composante par composante de deux modèles à fragilités
    indépendantes : ψ = ψ_1 ψ_2, fragilité W = W_1 + W_2

    Raises:
        StructuralError: si les dimensions diffèrent
    """
    if m1.d != m2.d:
        raise StructuralError("Dimensions différentes", d1=m1.d, d2=m2.d)
    log1, log2 = _log_psi(m1), _log_psi(m2)

    analytic = None
    if m1.analytic_lambda is not None and m2.analytic_lambda is not None:
        analytic = lambda index, x: m1.analytic_lambda(index, x) + m2.analytic_lambda(index, x)  # noqa: E731

    sampler = None
    if m1.frailty_sampler is not None and m2.frailty_sampler is not None:
        s1, s2 = m1.frailty_sampler, m2.frailty_sampler
        sampler = lambda rng, n: s1(rng, n) + s2(rng, n)  # noqa: E731

    levy = None
    if m1.levy is not None and m2.levy is not None:
        from app.core.levy import combine
        levy = combine(m1.levy, m2.levy)

    return LaplaceModel(
        name=f"min({m1.name},{m2.name})",
        d=m1.d,
        psi=lambda x: m1.psi(x) * m2.psi(x),
        log_psi=lambda x: log1(x) + log2(x),
        analytic_lambda=analytic,
        frailty_sampler=sampler,
        levy=levy,
        params={"components": [m1.name, m2.name]},
        components=(m1.components or (m1,)) + (m2.components or (m2,)),
    )


# ==================== MODÈLES PARTAGÉS ====================

def _shared_sampler(scalar: Callable[[np.random.Generator, int], np.ndarray], d: int):
    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        return np.repeat(scalar(rng, n)[:, None], d, axis=1)
    return sampler


def shared_from_generator(
    phi: Callable[[np.ndarray], np.ndarray],
    d: int,
    log_phi: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    name: str = "archimedean",
    **extra,
) -> LaplaceModel:
    """
    Modèle de fragilité partagée ψ(t) = φ(t_1 + ... + t_d)

    Args:
        phi: générateur complètement monotone, φ(0) = 1
        d: dimension
        log_phi: log φ précis (facultatif)
        name: nom du modèle
        extra: champs supplémentaires de LaplaceModel

    Raises:
        DomainError: si φ(0) != 1 ou si φ croît
    """
    at_zero = float(np.asarray(phi(np.array([0.0])))[0])
    if abs(at_zero - 1.0) > 1e-12:
        raise DomainError(f"Le générateur vérifie φ(0) = {at_zero} != 1", phi0=at_zero)
    probe = np.concatenate([[0.0], np.logspace(-6, 6, 61)])
    values = np.asarray(phi(probe), dtype=float)
    if np.any(values < 0) or np.any(np.diff(values) > 1e-15):
        raise DomainError("Le générateur doit être positif et décroissant")

    def psi(x: np.ndarray) -> np.ndarray:
        return phi(x.sum(axis=-1))

    log_psi = None
    if log_phi is not None:
        log_psi = lambda x: log_phi(x.sum(axis=-1))  # noqa: E731

    extra.setdefault(
        "native_marginals",
        MarginalSpec.repeat(ImplicitMarginal(survival=phi, log_survival=log_phi, name=f"{name}-marginal"), d),
    )
    return LaplaceModel(name=name, d=d, psi=psi, log_psi=log_psi, **extra)


def shared_gamma(shape: float, d: int = 2, name: str = "shared_gamma") -> LaplaceModel:
    """
    Fragilité partagée W ~ Gamma(k, 1) : ψ(t) = (1 + Σt)^{-k},
    λ_I = k (|I|-1)! / (1 + Σ_{i∈I} t_i)^{|I|}
    """
    if not shape > 0:
        raise DomainError("Le paramètre de forme doit être > 0", shape=shape)
    k = float(shape)

    def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
        s = x[:, list(index.axes)].sum(axis=1)
        return k * math.factorial(index.size - 1) / (1.0 + s) ** index.size

    def dens(x: np.ndarray) -> np.ndarray:
        return poch(k, d) * (1.0 + x.sum(axis=1)) ** (-k - d)

    params = {} if name == "clayton" else {"shape": k}
    return shared_from_generator(
        lambda s: (1.0 + s) ** -k,
        d,
        log_phi=lambda s: -k * np.log1p(s),
        name=name,
        analytic_lambda=lam,
        analytic_density=dens,
        frailty_sampler=_shared_sampler(lambda rng, n: rng.gamma(k, 1.0, n), d),
        native_marginals=MarginalSpec.repeat(lomax(k), d),
        params=params,
    )


def clayton(d: int = 2) -> LaplaceModel:
    """Fragilité exponentielle partagée : ψ(t) = 1 / (1 + Σt)"""
    return shared_gamma(1.0, d, name="clayton")


def _half_power_coefficient(n: int) -> float:
    """c_n = d^n/ds^n s^{1/2} / s^{1/2-n}"""
    return math.prod(0.5 - m for m in range(n))


def invgauss(theta: float, d: int = 2) -> LaplaceModel:
    """Fragilité partagée W = Z^{-2}, Var(Z) = 2/θ² : ψ(t) = exp(-θ √Σt)"""
    if not theta > 0:
        raise DomainError("θ doit être > 0", theta=theta)

    def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
        n = index.size
        s = x[:, list(index.axes)].sum(axis=1)
        with np.errstate(divide="ignore"):
            return (-1) ** (n + 1) * theta * _half_power_coefficient(n) * s ** (0.5 - n)

    dens = None
    if d == 2:
        def dens(x: np.ndarray) -> np.ndarray:
            s = x.sum(axis=1)
            return np.exp(-theta * np.sqrt(s)) * (theta ** 2 / (4 * s) + theta / (4 * s ** 1.5))

    def scalar(rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.normal(0.0, math.sqrt(2.0) / theta, n)
        return 1.0 / z ** 2

    return shared_from_generator(
        lambda s: np.exp(-theta * np.sqrt(s)),
        d,
        log_phi=lambda s: -theta * np.sqrt(s),
        name="invgauss",
        analytic_lambda=lam,
        analytic_density=dens,
        frailty_sampler=_shared_sampler(scalar, d),
        native_marginals=MarginalSpec.repeat(weibull(0.5, scale=1.0 / theta ** 2), d),
        params={"theta": float(theta)},
    )


def degenerate(d: int = 2) -> LaplaceModel:
    """W ≡ 1 : exponentielles standard indépendantes"""

    def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
        return np.full(x.shape[0], 1.0 if index.size == 1 else 0.0)

    return LaplaceModel(
        name="independence",
        d=d,
        psi=lambda x: np.exp(-x.sum(axis=1)),
        log_psi=lambda x: -x.sum(axis=1),
        analytic_lambda=lam,
        analytic_density=lambda x: np.exp(-x.sum(axis=1)),
        frailty_sampler=lambda rng, n: np.ones((n, d)),
        levy=LevyTriplet(b=(1.0,) * d),
        native_marginals=MarginalSpec.repeat(exponential(1.0), d),
    )


# ==================== FRAGILITÉ χ² ====================

def _cycle_sum(B: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Σ sur les ordres cycliques de I du produit B_{a1 a2} ... B_{an a1}"""
    first, rest = axes[0], axes[1:]
    total = np.zeros(B.shape[0])
    for perm in itertools.permutations(rest):
        cycle = (first, *perm)
        term = np.ones(B.shape[0])
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            term = term * B[:, a, b]
        total += term
    return total


def chisq(cov: GaussianCovariance, name: str = "chisq") -> LaplaceModel:
    """
    Fragilités W_i = Z_i², Z ~ N(0, Σ) : ψ(t) = det(I + 2 diag(t) Σ)^{-1/2}

    Avec B = Σ (I + 2TΣ)^{-1}, λ_I = 2^{|I|-1} Σ_{cycles} ∏ B.
    """
    sigma = cov.matrix
    d = cov.d
    chol = cov.cholesky

    def log_psi(x: np.ndarray) -> np.ndarray:
        r = np.sqrt(x)
        m = 2.0 * r[:, :, None] * sigma[None, :, :] * r[:, None, :]
        return -0.5 * np.log1p(np.linalg.eigvalsh(m)).sum(axis=1)

    def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
        tilt = np.zeros_like(x)
        tilt[:, list(index.axes)] = x[:, list(index.axes)]
        # (I + 2TΣ)^T = I + 2ΣT ; B = Σ M^{-1}
        mt = np.eye(d)[None] + 2.0 * sigma[None, :, :] * tilt[:, None, :]
        B = np.swapaxes(np.linalg.solve(mt, np.broadcast_to(sigma, mt.shape)), 1, 2)
        return 2.0 ** (index.size - 1) * _cycle_sum(B, index.axes)

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.standard_normal((n, d)) @ chol.T
        return z ** 2

    variances = cov.variances
    return LaplaceModel(
        name=name,
        d=d,
        psi=lambda x: np.exp(log_psi(x)),
        log_psi=log_psi,
        analytic_lambda=lam,
        frailty_sampler=sampler,
        native_marginals=MarginalSpec(tuple(lomax(0.5, scale=1.0 / (2.0 * v)) for v in variances)),
        params={"sigma": sigma.tolist()},
    )


def chisq3(params: TrivariateChiSqParams) -> LaplaceModel:
    return chisq(params, name="chisq3")


def chisq3_survival(p: TrivariateChiSqParams, t):
    """
    (8Δt₁t₂t₃ + 4Δ₁₂t₁t₂ + 4Δ₁₃t₁t₃ + 4Δ₂₃t₂t₃ + Σ 2σ_j²t_j + 1)^{-1/2}
    """
    points, scalar = _orthant_points(3, t)
    t1, t2, t3 = points[:, 0], points[:, 1], points[:, 2]
    var = p.variances
    base = (
        8 * p.delta * t1 * t2 * t3
        + 4 * p.delta_pair(1, 2) * t1 * t2
        + 4 * p.delta_pair(1, 3) * t1 * t3
        + 4 * p.delta_pair(2, 3) * t2 * t3
        + 2 * (var[0] * t1 + var[1] * t2 + var[2] * t3)
        + 1
    )
    return _out(base ** -0.5, scalar)


PAIRS = ((1, 2), (1, 3), (2, 3))


def chisq3_parts(p: TrivariateChiSqParams, t) -> ChiSqParts:
    """
    Parts de dépendance du modèle χ² trivarié en un point

    S_{ij} = (1 - ρ_ij² y_i y_j)^{-1/2} et
    S_{123} = {∏(ρ_ij² y_i y_j - 1) / (Σ ρ_ij² y_i y_j - 1 - 2 ρ₁₂ρ₁₃ρ₂₃ y₁y₂y₃)}^{1/2}
    avec y_i = 1 - S_i².
    """
    points, _ = _orthant_points(3, t)
    x = points[0]
    var = p.variances
    s_i = (1.0 + 2.0 * var * x) ** -0.5
    y = 1.0 - s_i ** 2

    s_pair, s_dep, lam = {}, {}, {}
    for i, j in PAIRS:
        a, b = i - 1, j - 1
        joint = (1 + 2 * var[a] * x[a] + 2 * var[b] * x[b] + 4 * p.delta_pair(i, j) * x[a] * x[b]) ** -0.5
        s_pair[(i, j)] = float(joint)
        s_dep[(i, j)] = float((1.0 - p.rho(i, j) ** 2 * y[a] * y[b]) ** -0.5)
        lam[(i, j)] = float(2.0 * p.cov(i, j) ** 2 * joint ** 4)

    terms = [p.rho(i, j) ** 2 * y[i - 1] * y[j - 1] for i, j in PAIRS]
    numerator = math.prod(term - 1.0 for term in terms)
    rho_product = p.rho(1, 2) * p.rho(1, 3) * p.rho(2, 3)
    denominator = sum(terms) - 1.0 - 2.0 * rho_product * y[0] * y[1] * y[2]
    return ChiSqParts(
        S=chisq3_survival(p, x),
        S_i=tuple(float(v) for v in s_i),
        S_pair=s_pair,
        S_dep_pair=s_dep,
        S_dep_triple=float(math.sqrt(numerator / denominator)),
        lambda_pair=lam,
    )


# ==================== FRAGILITÉ LOG-NORMALE ====================

def lognormal(cov: GaussianCovariance, mu=None, nodes: Optional[int] = None) -> LaplaceModel:
    """
    Fragilités W_i = exp(Z_i), Z ~ N(μ, Σ)

    ψ n'a pas de forme close : quadrature de Gauss-Hermite tensorisée
    (settings.gauss_hermite_nodes nœuds par axe, d <= 3). Les λ_I
    analytiques (|I| <= 3) sont les cumulants joints sous Q_t, calculés
    sur les mêmes nœuds.
    """
    d = cov.d
    if d > 3:
        raise CapabilityError("Quadrature log-normale limitée à d <= 3", d=d)
    mu = np.zeros(d) if mu is None else np.asarray(mu, dtype=float)
    if mu.shape != (d,):
        raise StructuralError("μ doit être de dimension d", d=d)
    z, weights = gauss_hermite_tensor(nodes or settings.gauss_hermite_nodes, d)
    frailty = np.exp(mu + z @ cov.cholesky.T)
    log_weights = np.log(weights)
    chunk = max(1, 2 ** 22 // frailty.shape[0])

    def log_psi(x: np.ndarray) -> np.ndarray:
        out = np.empty(x.shape[0])
        for start in range(0, x.shape[0], chunk):
            a = x[start:start + chunk] @ frailty.T
            near = np.expm1(-a) @ weights
            far = logsumexp(log_weights - a, axis=1)
            out[start:start + chunk] = np.where(near > -0.5, np.log1p(np.maximum(near, -0.5)), far)
        return out

    def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
        if index.size > 3:
            raise CapabilityError("Cumulants analytiques limités à |I| <= 3")
        axes = list(index.axes)
        out = np.empty(x.shape[0])
        for row in range(x.shape[0]):
            a = frailty[:, axes] @ x[row, axes]
            q = log_weights - a
            q = np.exp(q - q.max())
            q /= q.sum()
            centered = frailty[:, axes] - q @ frailty[:, axes]
            if index.size == 1:
                out[row] = q @ frailty[:, axes[0]]
            else:
                out[row] = q @ np.prod(centered, axis=1)
        return out

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        return np.exp(mu + rng.standard_normal((n, d)) @ cov.cholesky.T)

    return LaplaceModel(
        name="lognormal",
        d=d,
        psi=lambda x: np.exp(log_psi(x)),
        log_psi=log_psi,
        analytic_lambda=lam,
        frailty_sampler=sampler,
        params={"sigma": cov.matrix.tolist(), "mu": mu.tolist()},
    )
