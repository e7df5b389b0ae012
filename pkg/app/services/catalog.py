"""
Construction des modèles du catalogue à partir des spécifications JSON
"""

from typing import Optional

from pydantic import ValidationError

from app.core import depfun, frailty, higher, levy
from app.core.exceptions import SpecValidationError, StructuralError
from app.core.logging import get_logger
from app.models import depfun as marginal_laws
from app.models.catalog import CatalogModel
from app.models.chisq import GaussianCovariance, TrivariateChiSqParams
from app.models.depfun import MarginalSpec
from app.models.laplace import LaplaceModel
from app.models.levy import LevyTriplet
from app.models.minid import DiscreteExponentMeasure
from app.models.score import GridFactor, PolynomialFactor, ScoreFunction, ScoreTerm
from app.repositories.model_spec import ModelSpecRepository, validation_errors
from app.schemas import model_spec as schemas

logger = get_logger("catalog")


# ==================== MARGINALES ====================

def marginal_from_config(config: schemas.MarginalConfig):
    if config.kind == "exponential":
        return marginal_laws.exponential(config.rate)
    if config.kind == "weibull":
        return marginal_laws.weibull(config.shape, config.scale)
    if config.kind == "lomax":
        return marginal_laws.lomax(config.shape, config.scale)
    return marginal_laws.uniform()


def marginals_from_spec(marginals: schemas.MarginalsField, d: int) -> Optional[MarginalSpec]:
    """
    Une configuration unique est répétée sur les d axes ; une liste doit
    avoir exactement d éléments

    Raises:
        StructuralError: si la liste n'a pas la bonne longueur
    """
    if marginals is None:
        return None
    if isinstance(marginals, schemas.MarginalConfig):
        return MarginalSpec.repeat(marginal_from_config(marginals), d)
    if len(marginals) != d:
        raise StructuralError(f"{len(marginals)} marginales pour un modèle de dimension {d}", d=d)
    return MarginalSpec(tuple(marginal_from_config(m) for m in marginals))


# ==================== COPULES DE SCORE ====================

def score_from_spec(spec: schemas.ScoreCopulaSpec) -> ScoreFunction:
    terms = []
    for term in spec.terms:
        factors = []
        for factor in term.factors:
            if isinstance(factor, schemas.GridFactorConfig):
                factors.append(GridFactor(factor.values))
            else:
                factors.append(PolynomialFactor(factor.degree, factor.kind))
        terms.append(ScoreTerm(term.coef, tuple(factors)))
    return ScoreFunction(tuple(terms))


# ==================== MODÈLES ====================

def _frailty_model(spec) -> Optional[LaplaceModel]:
    if isinstance(spec, schemas.IndependenceSpec):
        return frailty.degenerate(spec.d)
    if isinstance(spec, schemas.ClaytonSpec):
        return frailty.clayton(spec.d)
    if isinstance(spec, schemas.SharedGammaSpec):
        return frailty.shared_gamma(spec.shape, spec.d)
    if isinstance(spec, schemas.InvGaussSpec):
        return frailty.invgauss(spec.theta, spec.d)
    if isinstance(spec, schemas.ChiSq3Spec):
        return frailty.chisq3(TrivariateChiSqParams(sigma=spec.sigma))
    if isinstance(spec, schemas.ChiSqSpec):
        return frailty.chisq(GaussianCovariance(sigma=spec.sigma))
    if isinstance(spec, schemas.LogNormalSpec):
        return frailty.lognormal(GaussianCovariance(sigma=spec.sigma), spec.mu, spec.nodes)
    if isinstance(spec, schemas.CompoundPoissonSpec):
        return levy.levy_model(LevyTriplet(b=spec.b, atoms=spec.atoms))
    return None


def _build(spec: schemas.ModelSpec) -> CatalogModel:
    if isinstance(spec, schemas.MinIdSpec):
        measure = DiscreteExponentMeasure(
            d=spec.d, atoms=spec.atoms, uniform_margin_boundary=spec.uniform_margin_boundary
        )
        return CatalogModel(type=spec.type, measure=measure)

    if isinstance(spec, schemas.ScoreCopulaSpec):
        return CatalogModel(type=spec.type, model=higher.copula_family(score_from_spec(spec), spec.theta))

    if isinstance(spec, schemas.PropSpec):
        return CatalogModel(type=spec.type, model=depfun.prop_model(spec.beta, marginals_from_spec(spec.marginals, 2)))

    if isinstance(spec, schemas.MultiPropSpec):
        target = marginals_from_spec(spec.marginals, spec.d)
        return CatalogModel(type=spec.type, model=depfun.multi_prop_model(spec.beta, spec.d, target))

    if isinstance(spec, schemas.FrankSpec):
        model = depfun.frank_model(spec.theta)
        target = marginals_from_spec(spec.marginals, 2)
        if target is not None:
            model = depfun.remarginalize(model, target)
        return CatalogModel(type=spec.type, model=model, target_marginals=target)

    native = _frailty_model(spec)
    target = marginals_from_spec(spec.marginals, native.d)
    if target is None:
        return CatalogModel(type=spec.type, model=native, frailty=native)
    return CatalogModel(
        type=spec.type,
        model=depfun.remarginalize(native, target),
        frailty=native,
        target_marginals=target,
    )


class CatalogService:
    def __init__(self, repository: Optional[ModelSpecRepository] = None):
        self.repository = repository or ModelSpecRepository()

    def parse(self, payload) -> schemas.ModelSpec:
        if isinstance(payload, (str, bytes)):
            return self.repository.parse(payload if isinstance(payload, str) else payload.decode())
        if isinstance(payload, dict):
            return self.repository.validate(payload)
        return payload

    def load(self, path) -> CatalogModel:
        return self.build(self.repository.load(path))

    def build(self, spec) -> CatalogModel:
        """
        Construit le modèle d'une spécification (dict, texte JSON ou schéma validé)

        Raises:
            SpecValidationError: si les paramètres sont rejetés par le constructeur du modèle
        """
        spec = self.parse(spec)
        try:
            model = _build(spec)
        except ValidationError as exc:
            raise SpecValidationError(
                f"Paramètres rejetés pour le modèle {spec.type}", errors=validation_errors(exc)
            ) from exc
        logger.info("modèle %s construit (d=%d)", model.name, model.d)
        return model
