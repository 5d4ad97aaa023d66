"""Holomorphic test functions from dual-cone spectra.

A quadrature-discretized smooth bump psi supported inside the dual cone
defines F(z) = sum_k w_k psi_k exp(2 pi i z . xi_k), a genuine
holomorphic function on the tube domain: every term is an exponential
with frequency in the dual cone, so the continuous reproducing identity
holds exactly for F and all residuals measured against the grid path
are pure discretization.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .cone import DualCone, PolyhedralCone, project
from .errors import BadShape, LengthMismatch, SupportEscapesDualCone
from .poisson import OperatorField, TLattice, T_CHOICE, X_CHOICE

DEFAULT_NODES_PER_AXIS = 24


@dataclass
class SpectralTestFunction:
    nodes: np.ndarray     # (K, n) quadrature points inside the dual cone
    weights: np.ndarray   # (K,) positive
    psi_vals: np.ndarray  # (K,) complex
    support_check: bool = True

    def __post_init__(self):
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        self.psi_vals = np.asarray(self.psi_vals, dtype=np.complex128)
        if not (len(self.weights) == len(self.psi_vals) == self.nodes.shape[0]):
            raise BadShape("nodes, weights and psi values must align")
        if np.any(self.weights <= 0):
            raise BadShape("quadrature weights must be positive")

    @property
    def n(self) -> int:
        return self.nodes.shape[1]

    def mass(self) -> float:
        """Upper bound sum w_k |psi_k| for |F| everywhere on the tube."""
        return float(np.sum(self.weights * np.abs(self.psi_vals)))

    def integral(self) -> complex:
        """Quadrature value of the integral of psi (= F at z = 0)."""
        return complex(np.sum(self.weights * self.psi_vals))


def make_bump_psi(dual: DualCone, center, radius: float, amplitude: float = 1.0,
                  nodes_per_axis: int = DEFAULT_NODES_PER_AXIS) -> SpectralTestFunction:
    """Tensor Gauss-Legendre discretization of a smooth bump.

    psi(xi) = amplitude * exp(-1 / (1 - |xi - center|^2 / radius^2)) on
    the ball, zero outside.  The ball must sit inside the dual cone,
    checked against every halfspace with margin radius.  Nodes where psi
    vanishes are dropped so that all stored nodes lie in the cone.
    """
    center = np.asarray(center, dtype=float)
    n = center.size
    if radius <= 0:
        raise BadShape("radius must be positive")
    margins = dual.halfspaces @ center
    if np.any(margins < radius - 1e-12):
        raise SupportEscapesDualCone(
            f"ball B(center, {radius}) leaves the dual cone "
            f"(min halfspace margin {margins.min():.6f})"
        )
    x_gl, w_gl = np.polynomial.legendre.leggauss(nodes_per_axis)
    axis_nodes = [center[a] + radius * x_gl for a in range(n)]
    mesh = np.meshgrid(*axis_nodes, indexing="ij")
    nodes = np.column_stack([m.ravel() for m in mesh])
    wmesh = np.meshgrid(*([radius * w_gl] * n), indexing="ij")
    weights = np.ones(nodes.shape[0])
    for m in wmesh:
        weights = weights * m.ravel()
    rho2 = np.sum((nodes - center) ** 2, axis=1) / radius**2
    psi = np.zeros(nodes.shape[0])
    inside = rho2 < 1.0
    psi[inside] = amplitude * np.exp(-1.0 / (1.0 - rho2[inside]))
    keep = psi != 0.0
    return SpectralTestFunction(
        nodes=nodes[keep], weights=weights[keep], psi_vals=psi[keep],
        support_check=True,
    )


def eval_f(stf: SpectralTestFunction, z) -> complex:
    """F(z) = sum_k w_k psi_k exp(2 pi i z . xi_k), Im z in the closed cone."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (stf.n,):
        raise LengthMismatch(f"expected a point in C^{stf.n}")
    phases = np.exp(2j * np.pi * (stf.nodes @ z))
    return complex(np.sum(stf.weights * stf.psi_vals * phases))


def _grid_eval(spec: gr.GridSpec, nodes: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """sum_k coeffs_k exp(2 pi i x . xi_k) over the whole grid.

    The tensor structure of the grid turns this into per-axis phase
    matrices contracted once per call."""
    n = spec.n
    phases = [
        np.exp(2j * np.pi * np.outer(nodes[:, a], spec.axis_coords(a)))
        for a in range(n)
    ]
    if n == 1:
        return coeffs @ phases[0]
    if n == 2:
        return (coeffs[:, None] * phases[0]).T @ phases[1]
    letters = "abcdefg"[:n]
    return np.einsum(f"k,{','.join(f'k{c}' for c in letters)}->{letters}",
                     coeffs, *phases)


def slice_grid(stf: SpectralTestFunction, spec: gr.GridSpec,
               y=None) -> gr.GridFunction:
    """Sample F(x + i y) on the grid; y = None gives the boundary value."""
    if spec.n != stf.n:
        raise LengthMismatch("grid and spectrum dimensions differ")
    coeffs = stf.weights * stf.psi_vals
    if y is not None:
        y = np.asarray(y, dtype=float)
        coeffs = coeffs * np.exp(-2.0 * np.pi * (stf.nodes @ y))
    return gr.GridFunction(spec, _grid_eval(spec, stf.nodes, coeffs))


def boundary_grid(stf: SpectralTestFunction, spec: gr.GridSpec) -> gr.GridFunction:
    """Exact boundary value F^b = F(. + i0) on the grid."""
    return slice_grid(stf, spec, y=None)


def _selector_factor(stf: SpectralTestFunction, cone: PolyhedralCone,
                     selector: dict | None) -> np.ndarray:
    factor = np.ones(stf.nodes.shape[0], dtype=np.complex128)
    if not selector:
        return factor
    for mu, choice in sorted(selector.items()):
        d = stf.nodes @ cone.generators[mu]
        if choice == X_CHOICE:
            factor = factor * (2j * np.pi * d)
        elif choice == T_CHOICE:
            factor = factor * (-2.0 * np.pi * np.abs(d))
        else:
            raise BadShape(f"unknown gradient choice {choice!r}")
    return factor


def lift_field(stf: SpectralTestFunction, cone: PolyhedralCone,
               lattice: TLattice, spec: gr.GridSpec,
               selector: dict | None = None) -> OperatorField:
    """Evaluate F(x + i project(t)) (or a mixed derivative of it) at
    every grid point and lattice node by direct spectral summation."""
    base = stf.weights * stf.psi_vals * _selector_factor(stf, cone, selector)
    dots = [stf.nodes @ cone.generators[mu] for mu in range(cone.m)]
    decays = [
        [np.exp(-2.0 * np.pi * t * d) for t in lattice.axis_values]
        for d in dots
    ]
    out = np.empty((lattice.node_count, *spec.sizes), dtype=np.complex128)
    for row, idx in enumerate(lattice.indices()):
        coeffs = base.copy()
        for mu, k in enumerate(idx):
            coeffs *= decays[mu][k]
        out[row] = _grid_eval(spec, stf.nodes, coeffs)
    return OperatorField(lattice=lattice, spec=spec, values=out,
                         selector=dict(selector) if selector else None)


def gradient_magnitude_sq_lift(stf: SpectralTestFunction, cone: PolyhedralCone,
                               lattice: TLattice, spec: gr.GridSpec) -> OperatorField:
    """Spectral-exact |grad_1 ... grad_m F|^2 summed over all 2^m
    component choices, per lattice node."""
    out = np.zeros((lattice.node_count, *spec.sizes))
    for choices in itertools.product((X_CHOICE, T_CHOICE), repeat=cone.m):
        sel = {mu: c for mu, c in enumerate(choices)}
        comp = lift_field(stf, cone, lattice, spec, selector=sel)
        out += np.abs(comp.values) ** 2
    return OperatorField(lattice=lattice, spec=spec,
                         values=out.astype(np.complex128))


def hardy_norm(stf: SpectralTestFunction, cone: PolyhedralCone, p: int,
               probe_lattice: TLattice, spec: gr.GridSpec):
    """Grid estimate of the H^p norm: maximize the horizontal slice norm
    over y = project(t) for t in the probe lattice.

    Returns (norm, t_at_max)."""
    if p not in (1, 2):
        raise BadShape("p must be 1 or 2")
    best = -np.inf
    best_t = None
    for idx in probe_lattice.indices():
        t = probe_lattice.node(idx)
        y = project(cone, t)
        val = gr.lp_norm(slice_grid(stf, spec, y=y), p)
        if val > best:
            best, best_t = val, t
    return best, best_t


def write_stf(path, stf: SpectralTestFunction) -> None:
    data = {
        "nodes": stf.nodes.tolist(),
        "weights": stf.weights.tolist(),
        "psi": [[float(v.real), float(v.imag)] for v in stf.psi_vals],
    }
    with open(path, "w") as fh:
        json.dump(data, fh)


def read_stf(path) -> SpectralTestFunction:
    with open(path) as fh:
        data = json.load(fh)
    psi = np.array([complex(re, im) for re, im in data["psi"]])
    return SpectralTestFunction(
        nodes=np.asarray(data["nodes"], dtype=float),
        weights=np.asarray(data["weights"], dtype=float),
        psi_vals=psi,
    )
