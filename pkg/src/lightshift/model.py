"""Physical configuration: modes, Lamb-Dicke couplings, laser drive and echo
schedule, thermal parameters, and validity margins.

Units: the lowest (centre-of-mass) mode frequency nu_1 = 1 and hbar = 1
throughout.  All times are in 1/nu_1, all rates and frequencies in nu_1.
"""

import json
import math
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from .hilbert import SpaceLayout

#: default threshold for the Lamb-Dicke validity margin eta*sqrt(nbar+1)
LD_THRESHOLD = 0.1


@dataclass(frozen=True)
class ModeSpec:
    """One collective motional mode (frequency in nu_1-units)."""

    nu: float
    n_max: int
    nbar: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("mode frequency must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.nbar < 0 or self.gamma < 0:
            raise ValueError("nbar and gamma must be nonnegative")


@dataclass(frozen=True)
class LaserDrive:
    """Carrier-resonant drive: Rabi frequency, static phases, echo schedule.

    echo_freq F is the phase-inversion frequency (0 disables the echo);
    inversions occur at echo_origin + k/F for k = 1, 2, ... and shift both
    ions' phases by pi simultaneously.
    """

    omega: float
    base_phases: tuple = (0.0, 0.0)
    echo_freq: float = 0.0
    echo_origin: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "base_phases", tuple(float(p) for p in self.base_phases))
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.echo_freq < 0:
            raise ValueError("echo_freq must be >= 0")


class LambDickeError(ValueError):
    """Raised when a configuration violates the Lamb-Dicke validity margin."""


@dataclass(frozen=True)
class ChainConfig:
    """Ion chain with two illuminated ions.

    eta is the 2 x N matrix of effective Lamb-Dicke parameters (rows: the two
    illuminated ions, columns: retained modes).  `ld_action` controls what
    happens if the Lamb-Dicke margin exceeds `ld_threshold`: "raise", "warn"
    or "ignore".
    """

    n_ions: int
    modes: tuple
    eta: np.ndarray
    drive: LaserDrive
    ld_threshold: float = LD_THRESHOLD
    ld_action: str = "raise"

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        eta = np.array(self.eta, dtype=float)
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)
        if eta.shape != (2, len(self.modes)):
            raise ValueError(f"eta must be 2 x n_modes, got {eta.shape}")
        if np.iscomplexobj(self.eta):
            raise ValueError("eta entries must be real")
        margins = lamb_dicke_margin(self)
        if np.any(margins >= self.ld_threshold):
            msg = (
                f"Lamb-Dicke margin eta*sqrt(nbar+1) = {margins} reaches the "
                f"threshold {self.ld_threshold}"
            )
            if self.ld_action == "raise":
                raise LambDickeError(msg)
            if self.ld_action == "warn":
                warnings.warn(msg)

    @property
    def n_modes(self):
        return len(self.modes)

    def layout(self):
        return SpaceLayout(qubit_count=2, mode_dims=tuple(m.n_max + 1 for m in self.modes))

    def replace_drive(self, **kwargs):
        d = self.drive
        new = LaserDrive(
            omega=kwargs.get("omega", d.omega),
            base_phases=kwargs.get("base_phases", d.base_phases),
            echo_freq=kwargs.get("echo_freq", d.echo_freq),
            echo_origin=kwargs.get("echo_origin", d.echo_origin),
        )
        return ChainConfig(self.n_ions, self.modes, self.eta, new,
                           self.ld_threshold, self.ld_action)


def two_ion_defaults(eta11, omega, nbar=(0.0, 0.0), gamma=(0.0, 0.0),
                     n_max=(15, 7), echo_freq=0.0, echo_origin=0.0,
                     base_phases=(0.0, 0.0), ld_threshold=LD_THRESHOLD,
                     ld_action="raise"):
    """Two-ion chain with its two collective modes.

    Mode frequencies are (1, sqrt(3)) and the Lamb-Dicke matrix follows the
    two-ion identities eta11 = eta21 = 3^(1/4) eta12 = -3^(1/4) eta22.
    """
    root4_3 = 3.0 ** 0.25
    eta = np.array([[eta11, eta11 / root4_3],
                    [eta11, -eta11 / root4_3]])
    modes = (
        ModeSpec(nu=1.0, n_max=int(n_max[0]), nbar=float(nbar[0]), gamma=float(gamma[0])),
        ModeSpec(nu=math.sqrt(3.0), n_max=int(n_max[1]), nbar=float(nbar[1]), gamma=float(gamma[1])),
    )
    drive = LaserDrive(omega=omega, base_phases=base_phases,
                       echo_freq=echo_freq, echo_origin=echo_origin)
    return ChainConfig(n_ions=2, modes=modes, eta=eta, drive=drive,
                       ld_threshold=ld_threshold, ld_action=ld_action)


def fig3_config(eta11=0.025, omega=1.5, echo_freq=1.0 / 50.0, n_max=(15, 7)):
    """The thermal-motion reference configuration used throughout the docs:
    nbar = (1, 0.1), heating rates (1e-3, 1e-4), eta11 = 0.025, Omega = 1.5,
    echo at F = 1/50."""
    return two_ion_defaults(eta11=eta11, omega=omega, nbar=(1.0, 0.1),
                            gamma=(1e-3, 1e-4), n_max=n_max, echo_freq=echo_freq)


def lamb_dicke_margin(cfg):
    """Per-mode validity margin eta_p sqrt(nbar_p + 1).

    For each mode the largest |eta_jp| over the two illuminated ions is used.
    """
    eta_p = np.abs(np.asarray(cfg.eta)).max(axis=0)
    nbar = np.array([m.nbar for m in cfg.modes])
    return eta_p * np.sqrt(nbar + 1.0)


@dataclass(frozen=True)
class DetuningReport:
    """Result of the detuning validity check |Omega - nu_p| >> eta_jp Omega."""

    ratios: np.ndarray          # per-mode minimum over ions of |Delta_p|/(|eta_jp| Omega)
    min_ratio: float
    factor: float
    passed: bool
    resonant_modes: tuple       # modes with Delta_p = 0


def detuning_margin(cfg, factor=10.0):
    """Ratio |Omega - nu_p| / (|eta_jp| Omega) minimised over modes and ions.

    The configuration passes at `factor` iff the minimum ratio is >= factor.
    A mode exactly resonant with the drive (Omega = nu_p) yields ratio 0 and
    is reported in `resonant_modes`.
    """
    omega = cfg.drive.omega
    nus = np.array([m.nu for m in cfg.modes])
    deltas = np.abs(omega - nus)
    resonant = tuple(int(p) for p in np.nonzero(deltas == 0.0)[0])
    eta_abs = np.abs(np.asarray(cfg.eta))
    with np.errstate(divide="ignore"):
        per_ion = np.where(eta_abs > 0,
                           deltas[None, :] / np.where(eta_abs > 0, eta_abs * omega, 1.0),
                           np.inf)
    ratios = per_ion.min(axis=0)
    ratios[list(resonant)] = 0.0
    min_ratio = float(ratios.min()) if ratios.size else math.inf
    return DetuningReport(ratios=ratios, min_ratio=min_ratio, factor=factor,
                          passed=(not resonant) and min_ratio >= factor,
                          resonant_modes=resonant)


def thermal_probabilities(nbar, n_max):
    """Thermal occupation law P(n) ~ nbar^n / (nbar+1)^(n+1), renormalised
    over n = 0..n_max."""
    n = np.arange(n_max + 1)
    if nbar == 0:
        p = np.zeros(n_max + 1)
        p[0] = 1.0
        return p
    p = (nbar / (nbar + 1.0)) ** n / (nbar + 1.0)
    return p / p.sum()


def thermal_sample(nbar, n_max, rng):
    """Draw a Fock number from the truncated thermal distribution."""
    if nbar < 0:
        raise ValueError("nbar must be >= 0")
    return int(rng.choice(n_max + 1, p=thermal_probabilities(nbar, n_max)))


def echo_inversion_count(t, drive):
    """Number of phase inversions in (echo_origin, t]."""
    if drive.echo_freq == 0.0 or t <= drive.echo_origin:
        return 0
    x = (t - drive.echo_origin) * drive.echo_freq
    # nudge against representation error at the inversion instants themselves
    return int(math.floor(x * (1.0 + 1e-14) + 1e-12))


def echo_sign(t, drive):
    """+1 on even echo intervals, -1 on odd ones (e^{i pi} per inversion)."""
    return -1.0 if echo_inversion_count(t, drive) % 2 else 1.0


def phase_at(t, drive):
    """Laser phases (phi_1(t), phi_2(t)) including echo inversions."""
    if t < 0:
        raise ValueError("t must be >= 0")
    shift = math.pi * (echo_inversion_count(t, drive) % 2)
    return (drive.base_phases[0] + shift, drive.base_phases[1] + shift)


def echo_time(t, drive):
    """Sign-weighted elapsed time integral_0^t s(t') dt'.

    Every phase inversion flips the carrier, so the co-rotating dressed
    phases advance with this quantity rather than with t itself; with the
    echo off it equals t.
    """
    if drive.echo_freq == 0.0 or t <= 0.0:
        return float(t)
    edges = [0.0] + echo_breakpoints(drive, 0.0, t) + [float(t)]
    return float(sum(echo_sign(0.5 * (a + b), drive) * (b - a)
                     for a, b in zip(edges[:-1], edges[1:])))


def echo_breakpoints(drive, t0, t1):
    """Phase-inversion instants strictly inside (t0, t1), in increasing order.

    Integrators must restart at each of these; the Hamiltonian is
    discontinuous there.
    """
    if drive.echo_freq == 0.0:
        return []
    period = 1.0 / drive.echo_freq
    k0 = echo_inversion_count(t0, drive) + 1
    out = []
    k = k0
    while True:
        tk = drive.echo_origin + k * period
        if tk >= t1 * (1.0 - 1e-15):
            break
        if tk > t0:
            out.append(tk)
        k += 1
    return out


# ---------------------------------------------------------------------------
# Configuration (de)serialisation.  The JSON schema mirrors ChainConfig
# verbatim; all quantities are in nu_1-units.  See README for the schema.

def config_to_dict(cfg):
    return {
        "n_ions": cfg.n_ions,
        "modes": [asdict(m) for m in cfg.modes],
        "eta": np.asarray(cfg.eta).tolist(),
        "drive": {
            "omega": cfg.drive.omega,
            "base_phases": list(cfg.drive.base_phases),
            "echo_freq": cfg.drive.echo_freq,
            "echo_origin": cfg.drive.echo_origin,
        },
        "ld_threshold": cfg.ld_threshold,
        "ld_action": cfg.ld_action,
    }


def config_from_dict(d):
    modes = tuple(ModeSpec(**m) for m in d["modes"])
    drive = LaserDrive(
        omega=d["drive"]["omega"],
        base_phases=tuple(d["drive"].get("base_phases", (0.0, 0.0))),
        echo_freq=d["drive"].get("echo_freq", 0.0),
        echo_origin=d["drive"].get("echo_origin", 0.0),
    )
    return ChainConfig(
        n_ions=d["n_ions"],
        modes=modes,
        eta=np.array(d["eta"], dtype=float),
        drive=drive,
        ld_threshold=d.get("ld_threshold", LD_THRESHOLD),
        ld_action=d.get("ld_action", "raise"),
    )


def save_config(cfg, path):
    with open(path, "w") as f:
        json.dump(config_to_dict(cfg), f, indent=2)


def load_config(path):
    with open(path) as f:
        return config_from_dict(json.load(f))
