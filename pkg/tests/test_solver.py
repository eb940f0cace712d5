import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.optimize import linprog

from conichom.errors import CapabilityError, ParameterError
from conichom.graph import complete, cycle, empty
from conichom.homomorphisms import hom_program
from conichom.solver import (
    FEASIBLE, INFEASIBLE, INFEASIBLE_VERDICT, OPTIMAL, ConicProgram, ProgramBuilder, SolverOptions,
    constraint_residual, feasibility, solve,
)
from conichom.theta import ConeTag, theta_program


def trace_program(rhs=1.0, pin=True):
    pb = ProgramBuilder()
    b = pb.add_psd_block(3)
    if pin:
        pb.add_constraint(psd_terms=[(b, 0, 0, 1.0)], rhs=rhs)
    else:
        pb.add_constraint(psd_terms=[(b, i, i, 1.0) for i in range(3)], rhs=rhs)
    return pb, b


def test_min_trace():
    pb, b = trace_program()
    pb.set_psd_objective(b, np.eye(3))
    rep = solve(pb.build("min"))
    assert rep.status == OPTIMAL
    assert rep.primal_value == pytest.approx(1.0, abs=1e-7)
    assert rep.psd_solution[0][0, 0] == pytest.approx(1.0, abs=1e-7)


def test_theta_programs():
    rep = solve(theta_program(empty(4), ConeTag.SPLUS))
    assert rep.primal_value == pytest.approx(4.0, abs=1e-7)
    rep = solve(theta_program(cycle(5), ConeTag.SPLUS))
    assert rep.primal_value == pytest.approx(math.sqrt(5), abs=1e-7)


def test_optimal_report_invariants():
    p = theta_program(cycle(5), ConeTag.DNN)
    opts = SolverOptions()
    rep = solve(p, opts)
    assert rep.optimal and rep.usable
    assert rep.gap <= opts.gap_tol * (1 + abs(rep.primal_value)) + 1e-12
    assert rep.primal_feas <= opts.feas_tol
    # re-verify the primal point independently
    assert constraint_residual(p, rep.psd_solution, rep.lp_solution) <= 10 * opts.feas_tol
    # maximisation: dual bound sits above the primal value
    assert rep.dual_value >= rep.primal_value - 1e-9


def test_linear_program_against_scipy():
    c = np.array([1.0, 2.0, 0.5])
    a = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, 2.0]])
    b = np.array([2.0, 1.0])
    pb = ProgramBuilder()
    s = pb.add_nonneg(3)
    for row, rhs in zip(a, b):
        pb.add_constraint(lp_terms=[(s + k, v) for k, v in enumerate(row)], rhs=rhs)
    for k, v in enumerate(c):
        pb.set_lp_objective(s + k, v)
    rep = solve(pb.build("min"))
    ref = linprog(c, A_eq=a, b_eq=b, bounds=[(0, None)] * 3, method="highs")
    assert rep.primal_value == pytest.approx(ref.fun, abs=1e-7)


def test_deterministic():
    p = theta_program(cycle(7), ConeTag.SPLUS)
    r1, r2 = solve(p), solve(p)
    assert r1.iterations == r2.iterations
    assert np.array_equal(r1.psd_solution[0], r2.psd_solution[0])


def test_inconsistent_equalities_certificate():
    pb, b = trace_program()
    pb.add_constraint(psd_terms=[(b, 0, 0, 1.0)], rhs=2.0)
    pb.set_psd_objective(b, np.eye(3))
    assert solve(pb.build("min")).status == INFEASIBLE


def test_feasibility_examples():
    pb, _ = trace_program(1.0, pin=False)
    res = feasibility(pb.build("min"), feas_tol=1e-8)
    assert res.verdict == FEASIBLE and res.residual <= 1e-8
    z = res.psd_solution[0]
    assert np.trace(z) == pytest.approx(1.0, abs=1e-8)
    assert np.linalg.eigvalsh(z)[0] >= -1e-8

    pb, _ = trace_program(-1.0, pin=False)
    res = feasibility(pb.build("min"), feas_tol=1e-8)
    assert res.verdict == INFEASIBLE_VERDICT
    assert res.violation >= 10 * 1e-8


def test_feasibility_hom_program():
    p = hom_program(cycle(5), complete(3), ConeTag.DNN)
    res = feasibility(p, feas_tol=1e-8)
    assert res.feasible
    assert constraint_residual(p, res.psd_solution, res.lp_solution) <= 1e-8 * 10


def test_feasibility_rejects_objective():
    pb, b = trace_program()
    pb.set_psd_objective(b, np.eye(3))
    with pytest.raises(ParameterError):
        feasibility(pb.build("min"))


def test_options_validation():
    with pytest.raises(ParameterError):
        SolverOptions(feas_tol=0)
    with pytest.raises(ParameterError):
        SolverOptions(max_iter=0)
    pb, b = trace_program()
    with pytest.raises(ParameterError):
        solve(pb.build("min"), SolverOptions(), feas_tol=1e-6)


def test_dimension_checks():
    with pytest.raises(ParameterError):
        ConicProgram(psd_dims=(2,), lp_dim=0, psd_rows=(sp.csr_matrix((1, 5)),),
                     lp_rows=sp.csr_matrix((1, 0)), rhs=np.zeros(1),
                     psd_objective=(np.zeros((2, 2)),), lp_objective=np.zeros(0), sense="min")
    pb = ProgramBuilder()
    b = pb.add_psd_block(2)
    with pytest.raises(ParameterError):
        pb.add_constraint(psd_terms=[(b, 0, 2, 1.0)], rhs=0.0)
    with pytest.raises(ParameterError):
        pb.build("sideways")


def test_size_cap(monkeypatch):
    monkeypatch.setenv("CONICHOM_MAX_PSD_DIM", "4")
    with pytest.raises(CapabilityError):
        solve(theta_program(cycle(5), ConeTag.SPLUS))
    monkeypatch.setenv("CONICHOM_MAX_PSD_DIM", "many")
    with pytest.raises(ParameterError):
        solve(theta_program(cycle(5), ConeTag.SPLUS))


def test_iteration_limit_is_a_status():
    rep = solve(theta_program(cycle(7), ConeTag.DNN), SolverOptions(max_iter=2))
    assert rep.status != OPTIMAL
    assert rep.iterations <= 2
