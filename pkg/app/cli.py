"""
Interface en ligne de commande : python -m app <commande>

Codes de sortie : 0 succès, 1 vérification échouée, 2 erreur d'usage,
3 erreur numérique ou de domaine.
"""

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import typer
from rich.table import Table

from app.config.settings import settings
from app.core.exceptions import HazdepError, SpecValidationError, StructuralError, VerificationFailure
from app.core.logging import configure_logging, console
from app.models.lattice import IndexSet
from app.repositories.base import BaseRepository
from app.repositories.golden import GoldenRepository
from app.schemas.figures import FIGURES
from app.schemas.grid import SUITES, GridConfig, VerificationReport
from app.services.catalog import CatalogService
from app.services.grid_service import GridService
from app.services.sampling_service import SamplingService
from app.services.verification_service import VerificationService

cli = typer.Typer(
    name="hazdep",
    help="Structure de dépendance des hasards de fonctions de survie multivariées",
    no_args_is_help=True,
    add_completion=False,
)


@contextmanager
def _errors() -> Iterator[None]:
    try:
        yield
    except HazdepError as exc:
        console.print(f"[bold red]{type(exc).__name__}[/] : {exc.detail}")
        for key, value in exc.context.items():
            console.print(f"  {key} = {value}")
        raise typer.Exit(code=exc.exit_code)


def _pair(text: str) -> tuple[int, int]:
    try:
        i, j = (int(part) for part in text.split(","))
    except ValueError:
        raise StructuralError(f"Paire attendue au format i,j, reçu {text!r}")
    return i, j


def _grid(text: str) -> GridConfig:
    try:
        return GridConfig.parse(text)
    except ValueError as exc:
        raise SpecValidationError(f"Grille invalide {text!r} : {exc}")


@cli.callback()
def main(log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING...")):
    configure_logging(log_level)


# ==================== GRILLES ====================

@cli.command("gamma-grid")
def gamma_grid(
    model: Path = typer.Option(..., "--model", help="spécification JSON du modèle"),
    out: Path = typer.Option(..., "--out", help="fichier GridCSV produit"),
    pair: str = typer.Option("1,2", "--pair"),
    resolution: int = typer.Option(settings.display_resolution, "--resolution", min=2),
    delta: float = typer.Option(settings.display_delta, "--delta"),
    route: str = typer.Option("auto", "--route", help="auto | closed-form | analytic | fd"),
):
    """γ_{0,{i,j}} sur une grille uniforme de [0, 1-δ]²"""
    with _errors():
        built = CatalogService().load(model)
        service = GridService()
        grid = service.gamma_grid(built, _pair(pair), resolution, delta, route)
        path = service.save(service.repository.from_gamma_grid(grid), out)
        console.print(f"{path} : {resolution}² nœuds ({grid.provenance}, {len(grid.masked)} masqué(s))")


@cli.command("factorize")
def factorize(
    model: Path = typer.Option(..., "--model"),
    subset: str = typer.Option(..., "--subset", help="ensemble I, ex. 1,2"),
    grid: str = typer.Option(..., "--grid", help="LO:HI:N"),
    out: Path = typer.Option(..., "--out"),
):
    """Λ_I par factorisation de Möbius sur la grille produit LO:HI:N"""
    with _errors():
        built = CatalogService().load(model)
        service = GridService()
        table = service.exponent_grid(built, IndexSet.parse(subset, built.d), _grid(grid))
        path = service.save(table, out)
        console.print(f"{path} : Λ_{{{subset}}} sur {table.data.shape[0]} nœuds")


# ==================== ÉCHANTILLONNAGE ====================

@cli.command("sample")
def sample(
    model: Path = typer.Option(..., "--model"),
    n: int = typer.Option(..., "-n", "--n", min=1),
    seed: int = typer.Option(0, "--seed", min=0),
    out: Path = typer.Option(..., "--out"),
):
    """n durées de vie du modèle, déterministes pour une graine donnée"""
    with _errors():
        built = CatalogService().load(model)
        service = SamplingService()
        path = service.repository.save(service.sample_table(built, n, seed), out)
        console.print(f"{path} : {n} tirages (graine {seed})")


# ==================== VÉRIFICATION ====================

def _summary(report: VerificationReport) -> Table:
    table = Table(title=f"Suite {report.suite} ({report.duration_s:.1f} s)")
    table.add_column("vérification")
    table.add_column("statut")
    table.add_column("valeur", justify="right")
    table.add_column("tolérance", justify="right")
    for item in report.checks:
        table.add_row(
            item.name,
            "[green]ok[/]" if item.passed else "[red]échec[/]",
            "" if item.value is None else f"{item.value:.3e}",
            "" if item.tolerance is None else f"{item.tolerance:.0e}",
        )
    return table


@cli.command("verify")
def verify(
    suite: str = typer.Option("all", "--suite", help=" | ".join((*SUITES, "all"))),
    out: Optional[Path] = typer.Option(None, "--out", help="copie du rapport JSON"),
):
    """Exécute une suite de vérification ; rapport JSON sur la sortie standard"""
    with _errors():
        report = VerificationService().run(suite)
        payload = report.model_dump_json(indent=2)
        if out is not None:
            BaseRepository().write_text(out, payload + "\n")
        console.print(_summary(report))
        typer.echo(payload)
        if not report.passed:
            raise VerificationFailure(
                f"{len(report.failures)} vérification(s) en échec", suite=suite,
                failures=[c.name for c in report.failures],
            )


@cli.command("figures")
def figures(
    out: Path = typer.Option(settings.golden_dir, "--out", help="dossier des grilles"),
):
    """Régénère les grilles γ₀ des figures"""
    with _errors():
        catalog, grids = CatalogService(), GridService()
        goldens = GoldenRepository(out)
        for figure in FIGURES:
            table = grids.gamma_table(
                catalog.build(figure.spec),
                pair=figure.pair, resolution=figure.resolution, delta=figure.delta,
            )
            path = goldens.save_figure(figure, table)
            console.print(f"{figure.name} -> {path}")
