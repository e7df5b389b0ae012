"""
Fonctions de dépendance semi-paramétriques

γ_I = λ_I / ∏ λ_i et sa version à l'échelle copule γ_{0,I}(u) = γ_I(F^{-1}(u)),
catalogue de formes closes, modèles proportionnels, transformations de
marginales et grilles de reproduction des figures.
"""

import math
from typing import Callable, Mapping, Optional, Union

import numpy as np

from app.config.settings import settings
from app.core.exceptions import CapabilityError, DomainError, StructuralError
from app.core.frailty import lambda_I
from app.core.lattice import is_survival_function, mixed_partial_log
from app.core.logging import get_logger
from app.models.depfun import GammaGrid, MarginalSpec, Provenance, SurvivalModel, exponential
from app.models.lattice import IndexSet, SurvivalOracle
from app.utils.parallel import map_parallel

logger = get_logger("depfun")

Routes = ("auto", "closed-form", "analytic", "fd")


# ==================== FORMES CLOSES ====================

def clayton_gamma0(u1, u2):
    """(1-u₁)(1-u₂) / (1-u₁u₂)²"""
    u1, u2 = np.asarray(u1, float), np.asarray(u2, float)
    return (1 - u1) * (1 - u2) / (1 - u1 * u2) ** 2


def shared_gamma_gamma0(shape: float, u1, u2):
    """a₁a₂ / (k (a₁+a₂-1)²), a = (1-u)^{-1/k}"""
    a1 = (1 - np.asarray(u1, float)) ** (-1.0 / shape)
    a2 = (1 - np.asarray(u2, float)) ** (-1.0 / shape)
    return a1 * a2 / (shape * (a1 + a2 - 1) ** 2)


def frank_gamma0(theta: float, u1, u2):
    """
    γ₀ du modèle de Frank (copule de Frank comme copule de survie)

    Avec v = 1-u, g = (e^{-θv₁}-1)(e^{-θv₂}-1)/(e^{-θ}-1) et L = log(1+g) :
    γ₀ = v₁v₂ G (L-g) / ((1+g) L)², G = θ² e^{-θv₁} e^{-θv₂} / (e^{-θ}-1)
    """
    v1 = 1 - np.asarray(u1, float)
    v2 = 1 - np.asarray(u2, float)
    denom = math.expm1(-theta)
    g = np.expm1(-theta * v1) * np.expm1(-theta * v2) / denom
    L = np.log1p(g)
    G = theta ** 2 * np.exp(-theta * v1) * np.exp(-theta * v2) / denom
    return v1 * v2 * G * (L - g) / ((1 + g) * L) ** 2


def invgauss_gamma0(u1, u2):
    """
    log(1-u₁)log(1-u₂) / {log²(1-u₁) + log²(1-u₂)}^{3/2}

    Indépendant de θ ; pôle à l'origine (NaN).
    """
    L1 = -np.log1p(-np.asarray(u1, float))
    L2 = -np.log1p(-np.asarray(u2, float))
    with np.errstate(invalid="ignore", divide="ignore"):
        return L1 * L2 / (L1 ** 2 + L2 ** 2) ** 1.5


def chisq_gamma0(rho2: float, u1, u2):
    """2ρ² [(1-u₁)(1-u₂) / (1 - ρ² u₁u₂(2-u₁)(2-u₂))]²"""
    u1, u2 = np.asarray(u1, float), np.asarray(u2, float)
    ratio = (1 - u1) * (1 - u2) / (1 - rho2 * u1 * u2 * (2 - u1) * (2 - u2))
    return 2 * rho2 * ratio ** 2


def prop_gamma0(beta: float, u1, u2):
    return np.full(np.broadcast(np.asarray(u1), np.asarray(u2)).shape, -float(beta))


def _require(condition: bool, detail: str, **context) -> None:
    if not condition:
        raise DomainError(detail, **context)


def catalog_gamma0(name: str, params: Mapping[str, float], u1, u2):
    """
    γ_{0,{1,2}} en forme close pour un modèle nommé du catalogue

    Args:
        name: clayton, shared_gamma, frank, invgauss, chisq, prop, independence
        params: paramètres du modèle (theta, shape, rho2, beta)
        u1, u2: coordonnées à l'échelle copule

    Raises:
        DomainError: paramètres hors des bornes documentées
        CapabilityError: modèle sans forme close
    """
    if name == "clayton":
        return clayton_gamma0(u1, u2)
    if name == "shared_gamma":
        k = float(params["shape"])
        _require(k > 0, "Gamma partagée : forme > 0 requise", shape=k)
        return shared_gamma_gamma0(k, u1, u2)
    if name == "frank":
        theta = float(params["theta"])
        _require(theta != 0 and math.isfinite(theta), "Frank : θ ≠ 0 requis", theta=theta)
        return frank_gamma0(theta, u1, u2)
    if name == "invgauss":
        theta = float(params.get("theta", 1.0))
        _require(theta > 0, "Inverse gaussienne : θ > 0 requis", theta=theta)
        return invgauss_gamma0(u1, u2)
    if name == "chisq":
        rho2 = float(params["rho2"])
        _require(0 <= rho2 < 1, "χ² : 0 <= ρ² < 1 requis", rho2=rho2)
        return chisq_gamma0(rho2, u1, u2)
    if name == "prop":
        beta = float(params["beta"])
        _require(0 <= beta <= 1, "Modèle proportionnel : 0 <= β <= 1 requis", beta=beta)
        return prop_gamma0(beta, u1, u2)
    if name == "independence":
        return prop_gamma0(0.0, u1, u2)
    raise CapabilityError(f"Pas de forme close de γ₀ pour le modèle {name}", model=name)


def model_gamma0(model, I: IndexSet) -> Callable[[np.ndarray], np.ndarray]:
    """
    Forme close de γ_{0,I} pour un modèle construit par le catalogue

    Returns:
        fonction (n, |I|) -> (n,)

    Raises:
        CapabilityError: si le modèle ou l'ensemble I n'a pas de forme close
    """
    I.require_nonempty()
    name = model.name
    params = dict(model.params)
    if name == "independence" and I.size >= 2:
        return lambda u: np.zeros(u.shape[0])
    if I.size != 2:
        raise CapabilityError(f"Forme close de γ₀ limitée aux paires ({name}, {I})", model=name)
    i, j = I.members

    if name in ("chisq", "chisq3"):
        sigma = np.asarray(params["sigma"], dtype=float)
        a, b = i - 1, j - 1
        rho2 = sigma[a, b] ** 2 / (sigma[a, a] * sigma[b, b])
        return lambda u: chisq_gamma0(rho2, u[:, 0], u[:, 1])
    if name == "multi_prop":
        beta = float(params["beta"].get(f"{i},{j}", 0.0))
        return lambda u: prop_gamma0(beta, u[:, 0], u[:, 1])
    if name in ("clayton", "shared_gamma", "frank", "invgauss", "prop"):
        catalog_gamma0(name, params, 0.5, 0.5)
        return lambda u: catalog_gamma0(name, params, u[:, 0], u[:, 1])
    raise CapabilityError(f"Pas de forme close de γ₀ pour le modèle {name}", model=name)


# ==================== γ_I ET γ_{0,I} ====================

def _points(x, size: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    scalar = x.ndim <= 1
    points = np.atleast_2d(x)
    if points.shape[-1] != size:
        raise StructuralError(f"Point de dimension {points.shape[-1]}, attendu {size}")
    return points, scalar


def _out(values, scalar: bool):
    values = np.asarray(values, dtype=float)
    return float(values.reshape(-1)[0]) if scalar else values


def gamma_I(lam_I: Callable[[np.ndarray], np.ndarray], marginals: MarginalSpec, s_I):
    """
    γ_I(s) = λ_I(s) / ∏_{i∈I} λ_i(s_i)

    Args:
        lam_I: évaluateur (n, |I|) -> (n,)
        marginals: marginales des |I| axes
        s_I: point (|I|,) ou lot (n, |I|)

    Raises:
        DomainError: si un taux de hasard marginal s'annule
    """
    points, scalar = _points(s_I, marginals.d)
    hazards = marginals.hazard(points)
    bad = ~(hazards > 0) | ~np.isfinite(hazards)
    if np.any(bad):
        where = points[np.argmax(bad.any(axis=-1))]
        raise DomainError("Taux de hasard marginal nul ou non fini", point=where)
    values = np.asarray(lam_I(points), dtype=float) / np.prod(hazards, axis=-1)
    return _out(values, scalar)


def model_lambda(model, I: IndexSet) -> Callable[[np.ndarray], np.ndarray]:
    """λ_I du modèle comme évaluateur sur les seuls axes de I"""
    I.require_nonempty()
    return lambda s: np.asarray(lambda_I(model, I, I.embed(np.atleast_2d(s))), dtype=float)


def _unit_points(u, size: int, delta: float) -> tuple[np.ndarray, bool]:
    points, scalar = _points(u, size)
    if np.any(~np.isfinite(points)) or np.any(points < 0):
        raise DomainError("Coordonnées hors de [0, 1)", point=points[0])
    if np.any(points > 1 - delta + 1e-12) or np.any(points >= 1):
        raise DomainError(
            f"u trop proche de 1 : les coordonnées doivent rester <= 1-δ (δ={delta})",
            delta=delta,
        )
    return points, scalar


def unit_exponential_oracle(oracle: SurvivalOracle, marginals: MarginalSpec) -> SurvivalOracle:
    """S^Y(s) = S(Λ^{-1}(s)) : même copule de survie, marginales exponentielles standard"""
    to_native = marginals.inverse_cum_hazard
    return SurvivalOracle(
        d=oracle.d,
        evaluator=lambda s: oracle(to_native(s)),
        log_evaluator=lambda s: oracle.log(to_native(s)),
        name=f"{oracle.name}[exp]",
    )


def _fd_gamma0(model, marginals: MarginalSpec, I: IndexSet, u: np.ndarray) -> np.ndarray:
    oracle = unit_exponential_oracle(model.oracle(), marginals)
    s = -np.log1p(-u)
    s = np.maximum(s, settings.fd_corner_clearance)
    return np.asarray(mixed_partial_log(oracle, I, I.embed(s)), dtype=float)


def _evaluate_gamma0(
    source, marginals: Optional[MarginalSpec], u, I: Optional[IndexSet],
    route: str, delta: Optional[float],
) -> tuple[np.ndarray, bool, Provenance]:
    if route not in Routes:
        raise StructuralError(f"Route inconnue : {route}", routes=list(Routes))
    delta = settings.boundary_delta if delta is None else delta

    if not hasattr(source, "oracle"):
        if marginals is None:
            raise StructuralError("Les marginales sont requises avec un évaluateur λ_I")
        points, scalar = _unit_points(u, marginals.d, delta)
        return np.atleast_1d(gamma_I(source, marginals, marginals.ppf(points))), scalar, "analytic"

    if I is None:
        if source.d != 2:
            raise StructuralError("I est requis pour d > 2", d=source.d)
        I = IndexSet.full(2)
    I.require_nonempty()
    marginals = source.marginals if marginals is None else marginals
    points, scalar = _unit_points(u, I.size, delta)

    if route in ("auto", "closed-form"):
        try:
            return np.asarray(model_gamma0(source, I)(points), float), scalar, "closed-form"
        except CapabilityError:
            if route == "closed-form":
                raise
    if route == "analytic" or (route == "auto" and source.analytic_lambda is not None):
        if source.analytic_lambda is None:
            raise CapabilityError(f"Pas de λ_I analytique pour {source.name}", model=source.name)
        sub = marginals.restrict(I)
        values = gamma_I(model_lambda(source, I), sub, sub.ppf(points))
        return np.atleast_1d(values), scalar, "analytic"
    return _fd_gamma0(source, marginals, I, points), scalar, "fd-pipeline"


def gamma_0I(source, marginals: Optional[MarginalSpec], u, I: Optional[IndexSet] = None,
             route: str = "auto", delta: Optional[float] = None):
    """
    γ_{0,I}(u) = γ_I(F^{-1}(u)) à l'échelle copule

    Args:
        source: modèle (LaplaceModel, SurvivalModel) ou évaluateur λ_I
        marginals: marginales du modèle (par défaut celles du modèle)
        u: point (|I|,) ou lot (n, |I|) de [0, 1-δ]
        I: ensemble d'indices (par défaut {1,2} en dimension 2)
        route: auto | closed-form | analytic | fd
        delta: marge au bord (settings.boundary_delta par défaut)

    Raises:
        DomainError: si u dépasse 1-δ
    """
    values, scalar, _ = _evaluate_gamma0(source, marginals, u, I, route, delta)
    return _out(values, scalar)


def exp_margin_gamma(model, I: IndexSet, s_I):
    """γ_I^{(Y)}(s) = γ_{0,I}(1 - e^{-s}) pour des marginales exponentielles standard"""
    s = np.asarray(s_I, dtype=float)
    if np.any(~(s > 0)):
        raise DomainError("s doit être strictement positif", s=s)
    return gamma_0I(model, None, -np.expm1(-s), I, delta=0.0)


# ==================== MODÈLES PROPORTIONNELS ====================

PairKey = Union[str, tuple[int, int], IndexSet]


def _pair_betas(betas: Mapping[PairKey, float], d: int) -> dict[tuple[int, int], float]:
    bound = 1.0 / (d - 1) ** 2
    pairs = {}
    for key, beta in betas.items():
        if isinstance(key, IndexSet):
            members = key.members
        elif isinstance(key, str):
            members = IndexSet.parse(key, d).members
        else:
            members = tuple(sorted(int(k) for k in key))
        if len(members) != 2 or len(set(members)) != 2 or not all(1 <= k <= d for k in members):
            raise StructuralError(f"Paire invalide : {key}", d=d)
        beta = float(beta)
        if not 0 <= beta <= bound:
            raise DomainError(
                f"β_{{{members[0]},{members[1]}}} = {beta} hors de la borne 0 <= β_I <= 1/(d-1)² = {bound}",
                beta=beta, bound=bound,
            )
        pairs[tuple(sorted(members))] = beta
    return pairs


def _prop_log(marginals: MarginalSpec, pairs: Mapping[tuple[int, int], float], points: np.ndarray) -> np.ndarray:
    L = marginals.cum_hazard(points)
    value = -L.sum(axis=-1)
    for (i, j), beta in pairs.items():
        value = value - beta * L[..., i - 1] * L[..., j - 1]
    return value


def prop_survival(marginals: MarginalSpec, beta: float, t):
    """S(t) = exp(-Λ₁(t₁) - Λ₂(t₂) - β Λ₁(t₁)Λ₂(t₂)), 0 <= β <= 1"""
    if marginals.d != 2:
        raise StructuralError("Le modèle proportionnel bivarié requiert 2 marginales")
    pairs = _pair_betas({(1, 2): beta}, 2)
    points, scalar = _points(t, 2)
    return _out(np.exp(_prop_log(marginals, pairs, points)), scalar)


def multi_prop_survival(marginals: MarginalSpec, betas: Mapping[PairKey, float], t):
    """
    S(t) = exp(-Σ Λ_i - Σ_{i<j} β_ij Λ_iΛ_j), chaque paire comptée une fois

    Raises:
        DomainError: si un β_I sort de [0, 1/(d-1)²]
    """
    pairs = _pair_betas(betas, marginals.d)
    points, scalar = _points(t, marginals.d)
    return _out(np.exp(_prop_log(marginals, pairs, points)), scalar)


def _check_survival(model: SurvivalModel, nodes: int = 11) -> None:
    axis = np.linspace(0.0, 0.99, nodes)
    u = np.stack([m.ravel() for m in np.meshgrid(*([axis] * model.d), indexing="ij")], axis=-1)
    values = model.survival(model.marginals.ppf(u)).reshape((nodes,) * model.d)
    if not is_survival_function(values):
        raise DomainError(f"{model.name} n'est pas une fonction de survie sur la grille de contrôle")


def multi_prop_model(betas: Mapping[PairKey, float], d: int, marginals: Optional[MarginalSpec] = None) -> SurvivalModel:
    """
    Modèle à dépendance de hasard proportionnelle : γ_{ij} ≡ -β_ij,
    Λ_I ≡ 0 pour |I| >= 3

    Le modèle est contrôlé comme fonction de survie (accroissements
    rectangulaires positifs) sur une grille de sonde.
    """
    marginals = marginals or MarginalSpec.repeat(exponential(1.0), d)
    if marginals.d != d:
        raise StructuralError(f"{marginals.d} marginales pour d={d}")
    pairs = _pair_betas(betas, d)

    def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
        hazards = marginals.hazard(x)
        if index.size == 1:
            return hazards[:, index.axes[0]]
        if index.size == 2:
            beta = pairs.get(index.members, 0.0)
            i, j = index.axes
            return -beta * hazards[:, i] * hazards[:, j]
        return np.zeros(x.shape[0])

    name = "prop" if d == 2 else "multi_prop"
    params = (
        {"beta": pairs.get((1, 2), 0.0)} if d == 2
        else {"beta": {f"{i},{j}": b for (i, j), b in pairs.items()}}
    )
    model = SurvivalModel(
        name=name,
        d=d,
        survival=lambda x: np.exp(_prop_log(marginals, pairs, x)),
        log_survival=lambda x: _prop_log(marginals, pairs, x),
        marginals=marginals,
        analytic_lambda=lam,
        params=params,
    )
    _check_survival(model)
    return model


def prop_model(beta: float, marginals: Optional[MarginalSpec] = None) -> SurvivalModel:
    return multi_prop_model({(1, 2): beta}, 2, marginals)


def frank_model(theta: float) -> SurvivalModel:
    """
    S(t) = C(e^{-t₁}, e^{-t₂}) avec C la copule de Frank
    C(v₁,v₂) = -(1/θ) log(1 + (e^{-θv₁}-1)(e^{-θv₂}-1)/(e^{-θ}-1)),
    marginales exponentielles standard
    """
    theta = float(theta)
    if theta == 0 or not math.isfinite(theta):
        raise DomainError("Frank : θ ≠ 0 requis", theta=theta)
    denom = math.expm1(-theta)

    def log_survival(x: np.ndarray) -> np.ndarray:
        v = np.exp(-x)
        g = np.expm1(-theta * v[:, 0]) * np.expm1(-theta * v[:, 1]) / denom
        return np.log(-np.log1p(g) / theta)

    def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
        if index.size == 1:
            return np.ones(x.shape[0])
        u = -np.expm1(-x)
        return frank_gamma0(theta, u[:, 0], u[:, 1])

    return SurvivalModel(
        name="frank",
        d=2,
        survival=lambda x: np.exp(log_survival(x)),
        log_survival=log_survival,
        marginals=MarginalSpec.repeat(exponential(1.0), 2),
        analytic_lambda=lam,
        params={"theta": theta},
    )


# ==================== TRANSFORMATIONS DE MARGINALES ====================

def _as_oracle(S) -> SurvivalOracle:
    if isinstance(S, SurvivalOracle):
        return S
    return S.oracle()


def copula_scale_survival(S, marginals: MarginalSpec, v):
    """
    Survie du vecteur (F_1(T_1), ..., F_d(T_d)) : S(F_1^{-1}(v_1), ...)

    Ses marges sont uniformes : C(v, 0, ..., 0) = 1 - v.
    """
    oracle = _as_oracle(S)
    points, scalar = _points(v, oracle.d)
    if np.any(points < 0) or np.any(points >= 1):
        raise DomainError("v doit rester dans [0, 1)", point=points[0])
    return _out(oracle(marginals.ppf(points)), scalar)


def survival_copula(S, marginals: MarginalSpec, w):
    """C_s(w) = S(S_1^{-1}(w_1), ..., S_d^{-1}(w_d)), w ∈ (0, 1]^d"""
    oracle = _as_oracle(S)
    points, scalar = _points(w, oracle.d)
    if np.any(~(points > 0)) or np.any(points > 1):
        raise DomainError("w doit rester dans (0, 1]", point=points[0])
    return _out(oracle(marginals.inverse_cum_hazard(-np.log(points))), scalar)


def remarginalize(model, target: MarginalSpec) -> SurvivalModel:
    """
    Même copule de survie, marginales remplacées par target

    S'(t) = S(τ(t)), τ_i = Λ_i^{-1} ∘ Λ'_i ; les λ_I analytiques suivent
    par λ'_I(t) = λ_I(τ(t)) ∏ λ'_i(t_i) / λ_i(τ_i).
    """
    native = model.marginals
    if target.d != model.d:
        raise StructuralError(f"{target.d} marginales pour un modèle de dimension {model.d}")
    oracle = model.oracle()

    def tau(x: np.ndarray) -> np.ndarray:
        return native.inverse_cum_hazard(target.cum_hazard(x))

    lam = None
    if model.analytic_lambda is not None:
        source = model.analytic_lambda

        def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
            axes = list(index.axes)
            moved = np.zeros_like(x)
            moved[:, axes] = tau(x)[:, axes]
            ratio = target.hazard(x)[:, axes] / native.hazard(moved)[:, axes]
            return source(index, moved) * np.prod(ratio, axis=1)

    return SurvivalModel(
        name=model.name,
        d=model.d,
        survival=lambda x: oracle(tau(x)),
        log_survival=lambda x: oracle.log(tau(x)),
        marginals=target,
        analytic_lambda=lam,
        params=dict(model.params),
    )


# ==================== GRILLES ====================

def _check_pair(model, pair: tuple[int, int]) -> IndexSet:
    i, j = pair
    if i == j or not (1 <= i <= model.d and 1 <= j <= model.d):
        raise CapabilityError(f"Paire ({i},{j}) non prise en charge pour d={model.d}", pair=list(pair))
    return IndexSet.of(model.d, i, j)


def gamma_grid(
    model, pair: tuple[int, int] = (1, 2), resolution: Optional[int] = None,
    delta: Optional[float] = None, route: str = "auto",
) -> GammaGrid:
    """
    γ_{0,{i,j}} sur la grille uniforme resolution² de [0, 1-δ]²

    Les pôles (valeurs NaN) sont conservés comme nœuds masqués.
    """
    resolution = resolution or settings.display_resolution
    delta = settings.display_delta if delta is None else delta
    if resolution < 2:
        raise StructuralError("Au moins 2 nœuds par axe", resolution=resolution)
    I = _check_pair(model, pair)
    axis = np.linspace(0.0, 1.0 - delta, resolution)
    mesh = np.meshgrid(axis, axis, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)

    _, _, provenance = _evaluate_gamma0(model, None, points[:1], I, route, delta)
    if provenance == "closed-form":
        values, _, _ = _evaluate_gamma0(model, None, points, I, route, delta)
    else:
        chunks = np.array_split(points, resolution)
        values = np.concatenate(map_parallel(
            lambda chunk: _evaluate_gamma0(model, None, chunk, I, route, delta)[0], chunks
        ))
    values = values.reshape(resolution, resolution)
    grid = GammaGrid(
        I=I, axes=(axis, axis), values=values, provenance=provenance, delta=delta,
        model=model.name, params=dict(model.params),
    )
    if grid.masked:
        logger.warning("%s : %d nœud(s) masqué(s) (pôle)", model.name, len(grid.masked))
    logger.info("grille γ₀ %s %s : %d² nœuds (%s)", model.name, I, resolution, provenance)
    return grid
