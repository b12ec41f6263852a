"""Dispersive reduction of the cavity-qubit system to a quartic oscillator.

All rates are in units of the second-cavity linewidth ``kappa2``.  The
qubit enters only through the fixed eigenvalue ``sigma_z`` (ground state
``-1`` by default); its full dynamics live in :mod:`sqzc.fock`.
"""
import cmath
import math
import warnings
from dataclasses import asdict, dataclass

from .errors import ConfigError, DispersiveWarning

__all__ = [
    "CircuitParams",
    "EffectiveParams",
    "HartreeState",
    "reduce",
    "hartree_drive",
    "effective_detuning",
    "closed_phase_evolution",
    "factorized_fourth_moment",
    "DISPERSIVE_LIMIT",
]

#: g/|delta_q| above which :func:`reduce` warns
DISPERSIVE_LIMIT = 0.15


@dataclass(frozen=True)
class CircuitParams:
    """Physical parameters of the amplifier -> cavity -> qubit cascade.

    Attributes
    ----------
    kappa1, kappa2 : float
        Decay rates of the amplifier cavity and the second cavity.
    eps1_mag, eps1_phase : float
        Modulus and phase of the parametric pump ``eps1``.
    g : float
        Cavity-qubit coupling.  ``g == 0`` removes the qubit.
    delta_q : float
        Qubit detuning from the amplifier frequency, ``w_q - w_1``.
    delta12 : float
        Bare cavity-cavity detuning ``w_2 - w_1``.
    sigma_z : int
        Qubit eigenvalue used by the dispersive reduction.
    """

    kappa1: float = 50.0
    kappa2: float = 1.0
    eps1_mag: float = 0.0
    eps1_phase: float = 0.0
    g: float = 0.0
    delta_q: float = 600.0
    delta12: float = 0.0
    sigma_z: int = -1

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "eps1_mag", "eps1_phase", "g",
                     "delta_q", "delta12"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.kappa1 <= 0 or self.kappa2 <= 0:
            raise ConfigError("kappa1 and kappa2 must be positive")
        if self.eps1_mag < 0:
            raise ConfigError("eps1_mag must be non-negative")
        if self.sigma_z not in (-1, 1):
            raise ConfigError("sigma_z must be -1 or +1")
        if self.g < 0:
            raise ConfigError("g must be non-negative")
        if self.g > 0 and abs(self.delta_q) <= self.g:
            raise ConfigError("dispersive validity requires |delta_q| > g")

    @property
    def eps1(self):
        return self.eps1_mag * cmath.exp(1j * self.eps1_phase)

    def replace(self, **changes):
        fields = asdict(self)
        fields.update(changes)
        return CircuitParams(**fields)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EffectiveParams:
    chi: float
    xi: float
    kappa2_tilde: float
    coupling_scale: float
    delta12_base: float
    xi_sign: float

    @property
    def zeta(self):
        """Quartic coefficient of the effective oscillator (``-xi sigma_z``)."""
        return self.xi_sign


@dataclass(frozen=True)
class HartreeState:
    """Normal-ordered second moments ``<a^dag a>`` and ``<a a>`` of one mode."""

    n_bar: float
    aa: complex

    def __post_init__(self):
        if self.n_bar < 0:
            raise ValueError("n_bar must be non-negative")


def reduce(params):
    """Map circuit parameters to the effective quartic-oscillator parameters.

    ``chi = g^2/D - g^4/D^3`` and ``xi = g^4/D^3`` with ``D = delta_q``.  The
    factor ``1 + (g/D)^2 sigma_z`` rescales both the cascade coupling and the
    second-cavity part of the collapse operator, so the effective linewidth
    is ``kappa2 * (1 + (g/D)^2 sigma_z)^2``.
    """
    g, dq, sz = params.g, params.delta_q, params.sigma_z
    if g == 0.0:
        chi = xi = 0.0
        ratio2 = 0.0
    else:
        if dq == 0.0:
            raise ConfigError("delta_q must be non-zero when g > 0")
        ratio = g / abs(dq)
        if ratio > DISPERSIVE_LIMIT:
            warnings.warn(
                f"g/|delta_q| = {ratio:.3f} exceeds {DISPERSIVE_LIMIT}; "
                "dispersive expansion may be inaccurate",
                DispersiveWarning, stacklevel=2,
            )
        ratio2 = (g / dq) ** 2
        xi = g ** 4 / dq ** 3
        chi = g ** 2 / dq - xi
    scale = 1.0 + ratio2 * sz
    # transition frequency n -> n+1 of (w2 - xi) n + chi (n + 1/2) sz - xi n^2 sz
    base = params.delta12 + chi * sz - xi * (1 + sz)
    return EffectiveParams(
        chi=chi,
        xi=xi,
        kappa2_tilde=params.kappa2 * scale ** 2,
        coupling_scale=scale,
        delta12_base=base,
        xi_sign=-xi * sz,
    )


def hartree_drive(zeta, aa):
    """Self-consistent parametric drive ``-2 i zeta <aa>`` of the Hartree model."""
    if isinstance(aa, HartreeState):
        aa = aa.aa
    return -2j * zeta * aa


def effective_detuning(params, eff, n_bar):
    """Moment-dependent cavity detuning ``delta12 - chi + 2 xi <n>`` (sigma_z = -1)."""
    if n_bar < 0:
        raise ValueError("n_bar must be non-negative")
    return eff.delta12_base + 2.0 * eff.xi_sign * n_bar


def closed_phase_evolution(omega_tilde, zeta, state, t):
    """Evolve the Hartree moments of the closed quartic oscillator for time ``t``.

    The photon number is conserved and ``<aa>`` only acquires a phase.
    """
    rate = 2.0 * zeta * state.n_bar + zeta + omega_tilde
    return HartreeState(state.n_bar, state.aa * cmath.exp(-2j * rate * t))


def factorized_fourth_moment(state):
    """Wick-factorised ``<a^dag a a^dag a>`` of a zero-mean Gaussian state."""
    n = state.n_bar
    return 2.0 * n * n + abs(state.aa) ** 2 + n
