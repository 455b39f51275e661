"""Four-rod endcap trap geometry and its JSON configuration.

All electrodes are cylinders parallel to the trap (z) axis.  The endcap
structure is two squares of four rods each, one at either end; body
diagonally opposite rods (one from each square, at opposite azimuths) are
wired as a pair, and the four pairs are driven with RF phase offsets 0,
pi/2, pi, 3 pi/2, which rotates a tilted saddle potential about the axis.
The remaining electrodes model the linear-trap rods and are held at a fixed
(by default zero) voltage.

The checked-in default geometry (default_trap.json) places the endcap rod
middles so that the line through two paired rod middles makes the
characteristic diagonal angle with the trap axis; every dimension can be
overridden through the JSON config.
"""
import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

__all__ = ["Rod", "TrapModel", "default_trap", "load_trap", "trap_from_dict"]

TRAP_SCHEMA = "berrytrap/trap-v1"


@dataclass(frozen=True)
class Rod:
    """A z-parallel cylindrical electrode.

    ``pair`` is the RF pair index 0..3 for endcap rods, or None for
    fixed-voltage electrodes (whose potential is ``voltage``).
    """
    center: tuple
    radius: float
    half_length: float
    pair: int = None
    voltage: float = 0.0

    def contains(self, x, y, z):
        cx, cy, cz = self.center
        return ((x - cx) ** 2 + (y - cy) ** 2 <= self.radius ** 2) \
            & (np.abs(z - cz) <= self.half_length)


@dataclass(frozen=True)
class TrapModel:
    """Electrode layout, drive parameters and bounding box.

    phase_offsets are the per-pair RF phases in radians; pair p is at
    voltage v0 * cos(omega t + phase_offsets[p]).  The box is a grounded
    enclosure centered on the origin with half-extents (hx, hy, hz).
    """
    rods: tuple
    v0: float
    omega: float
    phase_offsets: tuple = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
    box: tuple = (2.0e-3, 2.0e-3, 2.5e-3)
    diagonal_pair: int = 0

    def __post_init__(self):
        pairs = sorted({r.pair for r in self.rods if r.pair is not None})
        if pairs != [0, 1, 2, 3]:
            raise ValueError(f"expected exactly four endcap pairs 0..3, found {pairs}")
        if len(self.phase_offsets) != 4:
            raise ValueError("need one phase offset per pair")
        offs = [po % (2.0 * math.pi) for po in self.phase_offsets]
        for i in range(4):
            for k in range(i + 1, 4):
                if abs(offs[i] - offs[k]) < 1e-9:
                    raise ValueError("pair phase offsets must be distinct mod 2 pi")
        hx, hy, hz = self.box
        for rod in self.rods:
            cx, cy, cz = rod.center
            if (abs(cx) + rod.radius > hx or abs(cy) + rod.radius > hy
                    or abs(cz) + rod.half_length > hz):
                raise ValueError(f"rod at {rod.center} extends outside the bounding box")
        for i, a in enumerate(self.rods):
            for b in self.rods[i + 1:]:
                dxy = math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
                dz = abs(a.center[2] - b.center[2])
                overlap_z = dz < a.half_length + b.half_length
                if overlap_z and dxy < a.radius + b.radius:
                    raise ValueError(f"rods at {a.center} and {b.center} overlap")

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    def pair_voltages(self, t):
        """Instantaneous voltages of the four pairs at time t."""
        return tuple(self.v0 * math.cos(self.omega * t + off)
                     for off in self.phase_offsets)

    def electrode_voltage(self, rod, t, pair_voltages=None):
        if rod.pair is None:
            return rod.voltage
        if pair_voltages is not None:
            return pair_voltages[rod.pair]
        return self.pair_voltages(t)[rod.pair]

    def endcap_rods(self, pair=None):
        rods = [r for r in self.rods if r.pair is not None]
        if pair is not None:
            rods = [r for r in rods if r.pair == pair]
        return rods

    def diagonal_direction(self):
        """Unit vector along the line joining the middles of the rods of
        ``diagonal_pair`` (the trap's characteristic diagonal)."""
        a, b = self.endcap_rods(self.diagonal_pair)
        d = np.asarray(b.center, dtype=float) - np.asarray(a.center, dtype=float)
        return d / np.linalg.norm(d)

    def diagonal_angle(self):
        """Angle in radians between the characteristic diagonal and the z axis."""
        u = self.diagonal_direction()
        return math.acos(min(1.0, abs(u[2])))

    def min_rod_radius(self):
        return min(r.radius for r in self.rods)


def _endcap_positions(radial_offset, axial_center):
    """Rod centers of the four pairs: pair p at azimuth 45 + 90 p degrees on
    the -z square, paired body-diagonally with azimuth 225 + 90 p on +z."""
    out = []
    for p in range(4):
        psi = math.radians(45.0 + 90.0 * p)
        out.append((p, (radial_offset * math.cos(psi), radial_offset * math.sin(psi),
                        -axial_center)))
        out.append((p, (-radial_offset * math.cos(psi), -radial_offset * math.sin(psi),
                        axial_center)))
    return out


def trap_from_dict(cfg):
    """Build a TrapModel from the JSON schema (see default_trap.json)."""
    if cfg.get("schema") != TRAP_SCHEMA:
        raise ValueError(f"unsupported trap config schema: {cfg.get('schema')!r}")
    ec = cfg["endcap"]
    rods = []
    for pair, center in _endcap_positions(ec["radial_offset"], ec["axial_center"]):
        rods.append(Rod(center=center, radius=ec["rod_radius"],
                        half_length=ec["rod_length"] / 2.0, pair=pair))
    lin = cfg.get("linear")
    if lin:
        for psi_deg in (0.0, 90.0, 180.0, 270.0):
            psi = math.radians(psi_deg)
            rods.append(Rod(
                center=(lin["radial_offset"] * math.cos(psi),
                        lin["radial_offset"] * math.sin(psi), 0.0),
                radius=lin["rod_radius"], half_length=lin["rod_length"] / 2.0,
                pair=None, voltage=lin.get("voltage", 0.0)))
    drive = cfg["drive"]
    box = cfg["box"]
    return TrapModel(
        rods=tuple(rods),
        v0=drive["amplitude"],
        omega=2.0 * math.pi * drive["frequency_hz"],
        phase_offsets=tuple(math.radians(d) for d in drive["phase_offsets_deg"]),
        box=(box["half_width_x"], box["half_width_y"], box["half_depth_z"]),
    )


def load_trap(path):
    """Read a trap configuration from a JSON file."""
    with open(path) as fh:
        return trap_from_dict(json.load(fh))


def default_trap(**overrides):
    """The checked-in default geometry, optionally with overridden fields.

    Overrides are applied to the raw config dict before construction, e.g.
    default_trap(drive={"amplitude": 1000.0, ...}).
    """
    cfg = json.loads(resources.files("berrytrap.trap").joinpath("default_trap.json").read_text())
    for key, val in overrides.items():
        if isinstance(val, dict) and isinstance(cfg.get(key), dict):
            cfg[key] = {**cfg[key], **val}
        else:
            cfg[key] = val
    return trap_from_dict(cfg)
