"""Directional and iterated Poisson transforms over a cone.

The 1-d Poisson kernel along generator e_mu acts spectrally: its Fourier
multiplier is exp(-2 pi t |e_mu . xi|), which is exact on the reciprocal
lattice, whereas the kernel itself has no grid-aligned support on
non-axis lines.  Mixed space/scale gradients are extra multiplier
factors: 2 pi i (e_mu . xi) for the spatial choice and -2 pi |e_mu . xi|
for the d/dt choice.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .cone import PolyhedralCone
from .errors import (
    BadShape,
    EmptySelector,
    LengthMismatch,
    NonpositiveT,
    OutOfMemoryBudget,
)

DEFAULT_RATIO = float(np.sqrt(2.0))
DEFAULT_LEVELS = 8
MAX_NODES = 4096
DEFAULT_BUDGET = 2**27  # complex elements across all nodes

X_CHOICE = "X"
T_CHOICE = "T"


@dataclass(frozen=True)
class TLattice:
    """Finite geometric lattice in (R_+)^m with t-dt quadrature weights.

    Axis values are t_min * ratio^k, k = 0..levels-1.  The weight of a
    node approximates the integral of t dt over its geometric cell,
    0.5*(hi^2 - lo^2) per axis, with cell edges at geometric midpoints.
    """

    m: int
    t_min: float
    ratio: float = DEFAULT_RATIO
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        if self.m < 1 or self.levels < 1:
            raise BadShape("need m >= 1 and levels >= 1")
        if self.t_min <= 0 or self.ratio <= 1:
            raise BadShape("need t_min > 0 and ratio > 1")
        if self.levels**self.m > MAX_NODES:
            raise BadShape(
                f"{self.levels}^{self.m} nodes exceed the cap {MAX_NODES}"
            )

    @property
    def axis_values(self) -> np.ndarray:
        return self.t_min * self.ratio ** np.arange(self.levels)

    @property
    def axis_weights(self) -> np.ndarray:
        v = self.axis_values
        root = np.sqrt(self.ratio)
        edges = np.concatenate([[v[0] / root], np.sqrt(v[:-1] * v[1:]), [v[-1] * root]])
        return 0.5 * (edges[1:] ** 2 - edges[:-1] ** 2)

    @property
    def node_count(self) -> int:
        return self.levels**self.m

    def indices(self):
        """Lexicographic multi-indices over levels (deterministic order)."""
        return itertools.product(range(self.levels), repeat=self.m)

    def node(self, idx) -> np.ndarray:
        vals = self.axis_values
        return np.array([vals[k] for k in idx])

    def nodes(self) -> np.ndarray:
        vals = self.axis_values
        out = np.empty((self.node_count, self.m))
        for row, idx in enumerate(self.indices()):
            out[row] = vals[list(idx)]
        return out

    def weight(self, idx) -> float:
        w = self.axis_weights
        return float(np.prod([w[k] for k in idx]))

    def weights(self) -> np.ndarray:
        w = self.axis_weights
        return np.array([np.prod(w[list(idx)]) for idx in self.indices()])


def default_lattice(spec: gr.GridSpec, m: int, levels: int = DEFAULT_LEVELS,
                    ratio: float = DEFAULT_RATIO) -> TLattice:
    """Lattice anchored at t_min = 2h: the kernel must be resolved by at
    least two samples per width."""
    return TLattice(m=m, t_min=2.0 * spec.h, ratio=ratio, levels=levels)


def _axis_dots(spec: gr.GridSpec, cone: PolyhedralCone) -> list:
    """Per-generator e_mu . xi over the open frequency mesh."""
    freqs = spec.freqs()
    return [
        sum(cone.generators[mu, k] * freqs[k] for k in range(spec.n))
        for mu in range(cone.m)
    ]


def poisson_multiplier(spec: gr.GridSpec, cone: PolyhedralCone, t,
                       subset=None) -> np.ndarray:
    """Multiplier prod_mu exp(-2 pi t_mu |e_mu . xi|) on the lattice.

    With `subset` given, only those parameters convolve (t indexed by
    position in the subset)."""
    t = np.asarray(t, dtype=float)
    mus = list(range(cone.m)) if subset is None else list(subset)
    if t.shape != (len(mus),):
        raise LengthMismatch(f"expected {len(mus)} scales, got {t.shape}")
    if np.any(t <= 0):
        raise NonpositiveT("Poisson scales must be positive")
    dots = _axis_dots(spec, cone)
    out = np.ones(spec.sizes, dtype=np.complex128)
    for pos, mu in enumerate(mus):
        out = out * np.exp(-2.0 * np.pi * t[pos] * np.abs(dots[mu]))
    return out


def gradient_multiplier(spec: gr.GridSpec, cone: PolyhedralCone,
                        selector: dict) -> np.ndarray:
    """Factor for the mixed gradient: one X or T choice per selected mu."""
    if not selector:
        raise EmptySelector("gradient selector must be nonempty")
    dots = _axis_dots(spec, cone)
    out = np.ones(spec.sizes, dtype=np.complex128)
    for mu, choice in sorted(selector.items()):
        if choice == X_CHOICE:
            out = out * (2j * np.pi * dots[mu])
        elif choice == T_CHOICE:
            out = out * (-2.0 * np.pi * np.abs(dots[mu]))
        else:
            raise BadShape(f"unknown gradient choice {choice!r}")
    return out


def directional_poisson(f: gr.GridFunction, cone: PolyhedralCone, mu: int,
                        t_mu: float) -> gr.GridFunction:
    """Poisson integral along the line e_mu at scale t_mu."""
    if t_mu <= 0:
        raise NonpositiveT(f"t_mu = {t_mu}")
    return gr.apply_multiplier(
        f, poisson_multiplier(f.spec, cone, [t_mu], subset=[mu])
    )


def iterated_poisson(f: gr.GridFunction, cone: PolyhedralCone,
                     t) -> gr.GridFunction:
    """Composition of the m directional Poisson integrals (one pass)."""
    return gr.apply_multiplier(f, poisson_multiplier(f.spec, cone, t))


def mixed_gradient(f: gr.GridFunction, cone: PolyhedralCone, t,
                   selector: dict) -> gr.GridFunction:
    """Selected mixed derivative of the full iterated Poisson field."""
    mult = poisson_multiplier(f.spec, cone, t) * gradient_multiplier(
        f.spec, cone, selector
    )
    return gr.apply_multiplier(f, mult)


@dataclass
class OperatorField:
    """u(x, t) (or a derivative of it) materialized over a t-lattice.

    Values are stored node-major in the lattice's lexicographic order;
    all nodes share one grid."""

    lattice: TLattice
    spec: gr.GridSpec
    values: np.ndarray  # (node_count, *sizes)
    selector: dict | None = None

    def __post_init__(self):
        expect = (self.lattice.node_count, *self.spec.sizes)
        if self.values.shape != expect:
            raise BadShape(f"field shape {self.values.shape} != {expect}")

    def node_function(self, row: int) -> gr.GridFunction:
        return gr.GridFunction(self.spec, self.values[row])


def build_field(f: gr.GridFunction, cone: PolyhedralCone, lattice: TLattice,
                selector: dict | None = None,
                budget: int = DEFAULT_BUDGET) -> OperatorField:
    """Materialize the (optionally differentiated) Poisson field at
    every lattice node.  One forward transform; one inverse per node."""
    if lattice.m != cone.m:
        raise LengthMismatch("lattice parameter count != generator count")
    if lattice.node_count * f.spec.npoints > budget:
        raise OutOfMemoryBudget(
            f"{lattice.node_count} nodes x {f.spec.npoints} points "
            f"exceed budget {budget}"
        )
    fhat = gr.fourier_forward(f)
    dots = _axis_dots(f.spec, cone)
    decays = [
        [np.exp(-2.0 * np.pi * t * np.abs(dots[mu])) for t in lattice.axis_values]
        for mu in range(cone.m)
    ]
    gmult = gradient_multiplier(f.spec, cone, selector) if selector else None
    out = np.empty((lattice.node_count, *f.spec.sizes), dtype=np.complex128)
    for row, idx in enumerate(lattice.indices()):
        mult = fhat.values.copy()
        for mu, k in enumerate(idx):
            mult *= decays[mu][k]
        if gmult is not None:
            mult *= gmult
        node_hat = gr.GridFunction(f.spec, mult, gr.DOMAIN_FREQ)
        out[row] = gr.fourier_inverse(node_hat).values
    return OperatorField(lattice=lattice, spec=f.spec, values=out,
                         selector=dict(selector) if selector else None)


def gradient_magnitude_sq_field(f: gr.GridFunction, cone: PolyhedralCone,
                                lattice: TLattice, subset=None,
                                budget: int = DEFAULT_BUDGET) -> OperatorField:
    """Sum over all 2^|j| mixed-gradient components of |component|^2.

    This is the scalar integrand of the area and g functions; `subset`
    restricts the convolution, the derivatives and the lattice to those
    parameters (the full set by default)."""
    mus = list(range(cone.m)) if subset is None else sorted(subset)
    if not mus:
        raise EmptySelector("parameter subset must be nonempty")
    if lattice.m != len(mus):
        raise LengthMismatch("lattice dimension must match the subset size")
    if lattice.node_count * f.spec.npoints > budget:
        raise OutOfMemoryBudget("field exceeds element budget")
    fhat = gr.fourier_forward(f)
    dots = _axis_dots(f.spec, cone)
    decays = [
        [np.exp(-2.0 * np.pi * t * np.abs(dots[mu])) for t in lattice.axis_values]
        for mu in mus
    ]
    factors = {
        mu: {
            X_CHOICE: 2j * np.pi * dots[mu] * np.ones(f.spec.sizes),
            T_CHOICE: -2.0 * np.pi * np.abs(dots[mu]) * np.ones(f.spec.sizes),
        }
        for mu in mus
    }
    out = np.zeros((lattice.node_count, *f.spec.sizes))
    for row, idx in enumerate(lattice.indices()):
        base = fhat.values.copy()
        for pos, k in enumerate(idx):
            base *= decays[pos][k]
        for choices in itertools.product((X_CHOICE, T_CHOICE), repeat=len(mus)):
            mult = base.copy()
            for mu, choice in zip(mus, choices):
                mult *= factors[mu][choice]
            comp = gr.fourier_inverse(gr.GridFunction(f.spec, mult, gr.DOMAIN_FREQ))
            out[row] += np.abs(comp.values) ** 2
    return OperatorField(lattice=lattice, spec=f.spec,
                         values=out.astype(np.complex128))


# ---------------------------------------------------------------------------
# Field persistence: manifest + one TGF1 file per node

def field_node_name(idx) -> str:
    return "t_" + "_".join(f"{k:02d}" for k in idx) + ".tgf"


def write_field(dirpath, fld: OperatorField) -> None:
    os.makedirs(dirpath, exist_ok=True)
    names = []
    for row, idx in enumerate(fld.lattice.indices()):
        name = field_node_name(idx)
        gr.write_tgf(os.path.join(dirpath, name), fld.node_function(row))
        names.append(name)
    manifest = {
        "m": fld.lattice.m,
        "t_min": fld.lattice.t_min,
        "ratio": fld.lattice.ratio,
        "levels": fld.lattice.levels,
        "selector": fld.selector,
        "grid": {
            "n": fld.spec.n,
            "sizes": list(fld.spec.sizes),
            "box_half": fld.spec.box_half,
        },
        "nodes": names,
    }
    with open(os.path.join(dirpath, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)


def read_field(dirpath) -> OperatorField:
    with open(os.path.join(dirpath, "manifest.json")) as fh:
        manifest = json.load(fh)
    lattice = TLattice(
        m=manifest["m"],
        t_min=manifest["t_min"],
        ratio=manifest["ratio"],
        levels=manifest["levels"],
    )
    spec = gr.GridSpec(
        n=manifest["grid"]["n"],
        sizes=tuple(manifest["grid"]["sizes"]),
        box_half=manifest["grid"]["box_half"],
    )
    values = np.empty((lattice.node_count, *spec.sizes), dtype=np.complex128)
    for row, name in enumerate(manifest["nodes"]):
        values[row] = gr.read_tgf(os.path.join(dirpath, name)).values
    selector = manifest["selector"]
    if selector is not None:
        selector = {int(k): v for k, v in selector.items()}
    return OperatorField(lattice=lattice, spec=spec, values=values,
                         selector=selector)
