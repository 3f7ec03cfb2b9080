"""Hamiltonians and time evolution, computed two independent ways.

The brute-force route diagonalizes the Hermitian Hamiltonian and
exponentiates its spectrum (`expm_propagator`). The analytic route builds the
factorized propagator

    U(t) = exp[i Phi(t) J_x^2] * exp(-i omega_a a+a t) * f_disp(t)
           * exp(-i Omega sin(theta) t J_x)

with lambda = eta Omega cos(theta), Phi(t) = lambda^2 t / omega_a
- lambda^2 sin(omega_a t) / omega_a^2, and f_disp a coherent displacement of
amplitude beta(t) m conditioned on the J_x eigenvalue m, where
beta(t) = -(lambda / omega_a) (e^{i omega_a t} - 1). The two routes share no
matrix-exponential code, so their agreement is a meaningful check of both.

At t = tau = 2 pi / omega_a the rotation and displacement factors collapse to
the identity and the propagator becomes a purely internal unitary
exp[i C J_x^2] exp[-i D J_x] tensored with the motional identity
(`propagator_at_tau`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .hilbert import (
    ModelParams,
    OperatorMatrix,
    QuantumState,
    collective_spin,
    embed,
    ladder_operators,
    position_sine_operator,
)


@dataclass(frozen=True)
class PropagatorFactors:
    """The four factors of the analytic propagator, kept separately so each
    one can be inspected, plus their ordered product."""

    f_twist: OperatorMatrix
    f_rot: OperatorMatrix
    f_disp: OperatorMatrix
    f_carrier: OperatorMatrix
    product: OperatorMatrix
    t: float


def hamiltonian_ld(params: ModelParams) -> OperatorMatrix:
    """Lamb-Dicke Hamiltonian on the composite space.

    H = omega_a a+a + (Delta/2) J_z + Omega [eta (a + a+) cos(theta)
        + sin(theta)] J_x

    with Delta = params.delta * omega_a.
    """
    a, ad = ladder_operators(params.n_max)
    eye_m = OperatorMatrix(np.eye(params.dim_motion, dtype=complex), "motion")
    eye_i = OperatorMatrix(
        np.eye(params.dim_internal, dtype=complex), "internal"
    )
    number = OperatorMatrix(ad.mat @ a.mat, "motion")
    jx = collective_spin(params.n_ions, "x")

    h = params.omega_a * embed(eye_i, number).mat
    coupling = params.eta * (a.mat + ad.mat) * np.cos(params.theta) + np.sin(
        params.theta
    ) * np.eye(params.dim_motion)
    h = h + params.omega * embed(jx, OperatorMatrix(coupling, "motion")).mat
    if params.delta != 0.0:
        jz = collective_spin(params.n_ions, "z")
        h = h + (params.delta * params.omega_a / 2.0) * embed(jz, eye_m).mat
    return OperatorMatrix(h, "composite", dims=(params.dim_internal, params.dim_motion))


def hamiltonian_full(params: ModelParams) -> OperatorMatrix:
    """Full standing-wave Hamiltonian with the operator-valued sine.

    H = omega_a a+a + (Delta/2) J_z + Omega sin(eta (a + a+) + theta) J_x

    The sine operator is built at the padded cutoff (see
    `position_sine_operator`), so the Lamb-Dicke linearization is the only
    difference from `hamiltonian_ld`.
    """
    a, ad = ladder_operators(params.n_max)
    eye_m = OperatorMatrix(np.eye(params.dim_motion, dtype=complex), "motion")
    eye_i = OperatorMatrix(
        np.eye(params.dim_internal, dtype=complex), "internal"
    )
    number = OperatorMatrix(ad.mat @ a.mat, "motion")
    jx = collective_spin(params.n_ions, "x")

    h = params.omega_a * embed(eye_i, number).mat
    h = h + params.omega * embed(jx, position_sine_operator(params)).mat
    if params.delta != 0.0:
        jz = collective_spin(params.n_ions, "z")
        h = h + (params.delta * params.omega_a / 2.0) * embed(jz, eye_m).mat
    return OperatorMatrix(h, "composite", dims=(params.dim_internal, params.dim_motion))


def expm_propagator(h: OperatorMatrix, t: float) -> OperatorMatrix:
    """U = exp(-i H t) by Hermitian eigendecomposition.

    This is the oracle route: V diag(e^{-i lambda_k t}) V+ from numpy's eigh,
    independent of any series or scaling-squaring expansion.
    """
    if not h.is_hermitian(tol=1e-10):
        raise ValueError("expm_propagator requires a Hermitian matrix")
    vals, vecs = np.linalg.eigh(h.mat)
    u = (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T
    return OperatorMatrix(u, h.layout, h.dims)


def closed_form_propagator(params: ModelParams, t: float) -> PropagatorFactors:
    """The factorized propagator at time t (resonant case only).

    f_twist and f_carrier are exponentiated in the J_x eigenbasis; f_disp is
    assembled blockwise, one coherent displacement D(beta m) per J_x
    eigenvalue m, each block via a dense matrix exponential of the
    anti-Hermitian generator beta m a+ - (beta m)* a.
    """
    if params.delta != 0.0:
        raise ValueError(
            "the closed form is only valid on resonance; got delta="
            f"{params.delta} (use expm_propagator for detuned evolution)"
        )
    d_i, d_m = params.dim_internal, params.dim_motion
    dims = (d_i, d_m)
    omega = params.omega_a
    lam = params.eta * params.omega * np.cos(params.theta)

    jx = collective_spin(params.n_ions, "x")
    jx_vals, jx_vecs = np.linalg.eigh(jx.mat)

    phi = lam**2 * t / omega - lam**2 * np.sin(omega * t) / omega**2
    twist_internal = (jx_vecs * np.exp(1j * phi * jx_vals**2)) @ jx_vecs.conj().T
    f_twist = np.kron(twist_internal, np.eye(d_m))

    rot_phases = np.exp(-1j * omega * np.arange(d_m) * t)
    f_rot = np.kron(np.eye(d_i), np.diag(rot_phases))

    a, ad = ladder_operators(params.n_max)
    beta = -(lam / omega) * (np.exp(1j * omega * t) - 1.0)
    f_disp = np.zeros((d_i * d_m, d_i * d_m), dtype=complex)
    for k in range(d_i):
        alpha = beta * jx_vals[k]
        gen = alpha * ad.mat - np.conj(alpha) * a.mat
        block = scipy.linalg.expm(gen)
        projector = np.outer(jx_vecs[:, k], jx_vecs[:, k].conj())
        f_disp += np.kron(projector, block)

    carrier_phase = params.omega * np.sin(params.theta) * t
    carrier_internal = (jx_vecs * np.exp(-1j * carrier_phase * jx_vals)) @ jx_vecs.conj().T
    f_carrier = np.kron(carrier_internal, np.eye(d_m))

    product = f_twist @ f_rot @ f_disp @ f_carrier
    return PropagatorFactors(
        f_twist=OperatorMatrix(f_twist, "composite", dims),
        f_rot=OperatorMatrix(f_rot, "composite", dims),
        f_disp=OperatorMatrix(f_disp, "composite", dims),
        f_carrier=OperatorMatrix(f_carrier, "composite", dims),
        product=OperatorMatrix(product, "composite", dims),
        t=t,
    )


def propagator_at_tau(
    params: ModelParams,
) -> tuple[OperatorMatrix, float, float]:
    """Propagator after one full trap period, with its two coefficients.

    Returns (U, C, D) where U = exp[i C J_x^2] exp[-i D J_x] tensor identity,
    C = 2 pi eta^2 (Omega/omega_a)^2 cos^2(theta) and
    D = 2 pi (Omega/omega_a) sin(theta). The rotation and displacement factors
    are exactly the identity at t = tau, so the motional factor is trivial.
    """
    if params.delta != 0.0:
        raise ValueError("the pulse-period reduction requires delta = 0")
    r = params.omega_ratio
    c = 2.0 * np.pi * params.eta**2 * r**2 * np.cos(params.theta) ** 2
    d = 2.0 * np.pi * r * np.sin(params.theta)
    jx = collective_spin(params.n_ions, "x")
    vals, vecs = np.linalg.eigh(jx.mat)
    internal = (vecs * np.exp(1j * (c * vals**2 - d * vals))) @ vecs.conj().T
    u = np.kron(internal, np.eye(params.dim_motion))
    return (
        OperatorMatrix(u, "composite", dims=(params.dim_internal, params.dim_motion)),
        float(c),
        float(d),
    )


def evolve(state: QuantumState, u: OperatorMatrix) -> QuantumState:
    """Apply a unitary: U|psi> for pure states, U rho U+ for mixed ones."""
    if state.dim != u.dim:
        raise ValueError(
            f"dimension mismatch: state dim {state.dim}, operator dim {u.dim}"
        )
    if state.layout != u.layout:
        raise ValueError(
            f"layout mismatch: state {state.layout}, operator {u.layout}"
        )
    if state.kind == "pure":
        return QuantumState("pure", u.mat @ state.data, state.layout, state.dims)
    rho = u.mat @ state.data @ u.mat.conj().T
    # re-Hermitize to keep the constructor's validation happy at 1e-16 level
    rho = (rho + rho.conj().T) / 2.0
    return QuantumState("mixed", rho, state.layout, state.dims)
