"""Ready-made scenarios for the five reference figure data sets.

All rates are in units of ``kappa2``.  Resolution (sweep points, Wigner
grid, truncation) can be overridden through keyword arguments.
"""
from ..effective import CircuitParams
from ..errors import ConfigError
from ..fock.operators import HilbertConfig
from .config import OutputConfig, ScenarioConfig, SolverConfig, SweepAxis, Variant, WignerSpec

__all__ = ["RECIPES", "recipe", "FIGURE_PARAMETERS"]

#: circuit constants shared by every figure
FIGURE_PARAMETERS = {
    "kappa1": 50.0,
    "kappa2": 1.0,
    "g": 56.0,
    "delta_q_near": 600.0,
    "delta_q_far": 1200.0,
    "fig3_eps1": (10.0, 12.0),
    "fig5_eps1": 10.0,
    "fig5_delta12": 4.95,
}

_BASE = CircuitParams(kappa1=50.0, kappa2=1.0, g=56.0, delta_q=600.0)


def _fig1(eps_range=(1.0, 13.0), eps_points=25, dt_range=(-1.5, 1.0), dt_points=101):
    return ScenarioConfig(
        name="fig1",
        circuit=_BASE,
        sweep=(SweepAxis("delta_tilde", dt_range[0], dt_range[1], dt_points),
               SweepAxis("eps1", eps_range[0], eps_range[1], eps_points)),
        solver=SolverConfig(tier="gaussian"),
        output=OutputConfig("fig1", ("csv", "svg")),
    )


def _fig2(eps_points=13, n1=5, n2=30, full_truncation=False):
    if full_truncation:
        n1, n2 = 10, 50
    return ScenarioConfig(
        name="fig2",
        circuit=_BASE,
        truncation=HilbertConfig(n1, n2, True),
        sweep=(SweepAxis("eps1", 1.0, 13.0, eps_points),),
        solver=SolverConfig(tier="both", optimize_detuning=True, fock_refine=True),
        output=OutputConfig("fig2", ("csv", "svg")),
        variants=(
            Variant("no_qubit", {"g": 0.0}, include_qubit=False),
            Variant("delta_q_1200", {"delta_q": 1200.0}),
            Variant("delta_q_600", {"delta_q": 600.0}),
        ),
    )


def _fig3(xmax=4.0, points=201, n1=10, n2=50):
    return ScenarioConfig(
        name="fig3",
        circuit=_BASE.replace(eps1_mag=10.0),
        truncation=HilbertConfig(n1, n2, True),
        solver=SolverConfig(tier="fock", optimize_detuning=True),
        output=OutputConfig("fig3", ("csv", "svg")),
        task="wigner",
        wigner=WignerSpec(xmax, points),
        variants=(
            Variant("a_no_qubit", {"g": 0.0}, include_qubit=False),
            Variant("b_full", {}),
            Variant("c_dispersive", {}, hamiltonian="dispersive"),
            Variant("d_full_eps12", {"eps1_mag": 12.0}),
        ),
    )


def _fig4(eps_points=13, n1=5, n2=30, full_truncation=False):
    # the reduced default understates the moment error; see full_truncation
    if full_truncation:
        n1, n2 = 10, 50
    return ScenarioConfig(
        name="fig4",
        circuit=_BASE,
        truncation=HilbertConfig(n1, n2, True),
        sweep=(SweepAxis("eps1", 1.0, 13.0, eps_points),),
        solver=SolverConfig(tier="fock", optimize_detuning=True),
        output=OutputConfig("fig4", ("csv", "svg")),
        variants=(
            Variant("delta_q_600", {"delta_q": 600.0}),
            Variant("delta_q_1200", {"delta_q": 1200.0}),
        ),
    )


def _fig5(n1=10, n2=50):
    return ScenarioConfig(
        name="fig5",
        circuit=_BASE.replace(eps1_mag=10.0, delta12=4.95),
        truncation=HilbertConfig(n1, n2, True),
        solver=SolverConfig(tier="fock"),
        output=OutputConfig("fig5", ("csv", "svg")),
        task="number_distribution",
    )


RECIPES = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}


def recipe(name, **overrides):
    """Scenario reproducing figure ``name`` (``fig1`` ... ``fig5``)."""
    try:
        build = RECIPES[name]
    except KeyError:
        raise ConfigError(f"unknown recipe {name!r}; choose from {', '.join(RECIPES)}") from None
    return build(**overrides)
