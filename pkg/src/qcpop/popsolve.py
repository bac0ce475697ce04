"""Moment relaxation and local refinement for polynomial problems.

Two routes that cross-validate each other: (a) the order-d moment
relaxation compiled to a dense block SDP and solved by a primal-dual
interior-point method, followed by rank-one minimizer extraction;
(b) multistart gradient/Newton descent with Armijo line search.  The
relaxation optimum is a certified lower bound (when the SDP converges);
the refined points give matching upper bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import cvxopt
import numpy as np

from .objective import PopProblem
from .polyalg import RealPolynomial, monomials_up_to

GAP_TOL = 1e-7
RESIDUAL_TOL = 1e-8
RANK_RATIO_TOL = 1e-6
GRAD_TOL = 1e-10
MAX_SDP_ITERS = 200

_SDP_OPTIONS = {
    "show_progress": False,
    "maxiters": MAX_SDP_ITERS,
    "abstol": 1e-9,
    "reltol": 1e-9,
    "feastol": 1e-9,
}


# ---------------------------------------------------------------------------
# Relaxation construction
# ---------------------------------------------------------------------------

def with_ball(prob: PopProblem, radius: float | None = None) -> PopProblem:
    """Copy of the problem with the ball constraint R^2 - sum x_i^2 >= 0.

    Pruning can leave an exactly-SOS objective marginally non-SOS, which
    makes the unconstrained moment relaxation unbounded along recession
    directions; the ball keeps the description Archimedean.  The bound
    then certifies the ball only, which covers every sampling box used
    here.
    """
    r = prob.box_radius if radius is None else radius
    nv = prob.nvars
    terms = {(0,) * nv: r * r}
    for i in range(nv):
        mono = tuple(2 if j == i else 0 for j in range(nv))
        terms[mono] = -1.0
    ball = RealPolynomial(nv, terms)
    return PopProblem(
        objective=prob.objective,
        constraints=list(prob.constraints) + [ball],
        var_names=prob.var_names,
        box_radius=r,
    )

@dataclass
class MomentRelaxation:
    """Order-d relaxation: moment matrix plus one localizing block per g_j."""

    order: int
    nvars: int
    basis: list
    y_monomials: list  # all monomials of degree <= 2d, constant first
    blocks: list  # (name, size, F0, {y_index: F_i}) meaning F0 + sum y_i F_i >= 0
    objective_vec: np.ndarray
    objective_const: float
    problem: PopProblem

    @property
    def n_y(self):
        return len(self.y_monomials) - 1

    def moment_matrix(self, y):
        """M_d(y) for a vector y over the non-constant monomials."""
        size = len(self.basis)
        m = np.zeros((size, size))
        y_full = np.concatenate(([1.0], y))
        idx = {mono: k for k, mono in enumerate(self.y_monomials)}
        for i in range(size):
            for j in range(size):
                mono = tuple(a + b for a, b in zip(self.basis[i], self.basis[j]))
                m[i, j] = y_full[idx[mono]]
        return m

    def first_order_moments(self, y):
        idx = {mono: k for k, mono in enumerate(self.y_monomials)}
        y_full = np.concatenate(([1.0], y))
        out = np.zeros(self.nvars)
        for v in range(self.nvars):
            e = tuple(1 if i == v else 0 for i in range(self.nvars))
            out[v] = y_full[idx[e]]
        return out


def build_relaxation(prob: PopProblem, d: int) -> MomentRelaxation:
    """Moment and localizing blocks sharing one scalar per monomial."""
    nv = prob.nvars
    max_deg = max(
        [prob.objective.degree()] + [g.degree() for g in prob.constraints]
    )
    if 2 * d < max_deg:
        raise ValueError(
            f"relaxation order {d} too small for degree {max_deg} data"
        )
    y_monos = monomials_up_to(nv, 2 * d)
    assert y_monos[0] == (0,) * nv
    y_index = {mono: k for k, mono in enumerate(y_monos)}
    basis = monomials_up_to(nv, d)

    blocks = []

    def add_block(name, block_basis, g_terms):
        size = len(block_basis)
        f0 = np.zeros((size, size))
        fs = {}
        for i in range(size):
            for j in range(i, size):
                base = tuple(a + b for a, b in zip(block_basis[i], block_basis[j]))
                for gmono, gc in g_terms.items():
                    mono = tuple(a + b for a, b in zip(base, gmono))
                    k = y_index[mono]
                    if k == 0:
                        f0[i, j] += gc
                        if i != j:
                            f0[j, i] += gc
                    else:
                        mat = fs.setdefault(k - 1, np.zeros((size, size)))
                        mat[i, j] += gc
                        if i != j:
                            mat[j, i] += gc
        blocks.append((name, size, f0, fs))

    add_block("moment", basis, {(0,) * nv: 1.0})
    for jg, g in enumerate(prob.constraints):
        half = (g.degree() + 1) // 2
        gb = monomials_up_to(nv, d - half)
        add_block(f"loc_g{jg}", gb, g.terms)

    c = np.zeros(len(y_monos) - 1)
    const = 0.0
    for mono, coef in prob.objective.terms.items():
        k = y_index[mono]
        if k == 0:
            const += coef
        else:
            c[k - 1] += coef
    return MomentRelaxation(
        order=d,
        nvars=nv,
        basis=basis,
        y_monomials=y_monos,
        blocks=blocks,
        objective_vec=c,
        objective_const=const,
        problem=prob,
    )


# ---------------------------------------------------------------------------
# SDP solve (interior point via cvxopt's conelp behind this contract)
# ---------------------------------------------------------------------------

@dataclass
class SdpProblem:
    """min c.y subject to F0_k + sum_i y_i F_i_k >= 0 for every block."""

    c: np.ndarray
    blocks: list  # (F0, {var_index: F_i}) with symmetric matrices
    constant: float = 0.0


@dataclass
class SdpSolution:
    y: np.ndarray | None
    primal_objective: float
    dual_objective: float
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    status: str  # "optimal" or "degraded"
    raw_status: str

    @property
    def optimal(self):
        return self.status == "optimal"


def relaxation_sdp(rel: MomentRelaxation) -> SdpProblem:
    return SdpProblem(
        c=rel.objective_vec.copy(),
        blocks=[(f0, fs) for _, _, f0, fs in rel.blocks],
        constant=rel.objective_const,
    )


def solve_sdp(sdp: SdpProblem) -> SdpSolution:
    """Primal-dual interior-point solve of the block SDP.

    Never returns a silent wrong answer: anything short of full
    convergence is flagged as a degraded status with the residuals
    attached.
    """
    n = len(sdp.c)
    gs, hs = [], []
    for f0, fs in sdp.blocks:
        size = f0.shape[0]
        g = np.zeros((size * size, n))
        for i, fi in fs.items():
            g[:, i] = -fi.reshape(-1, order="F")
        gs.append(cvxopt.matrix(g))
        hs.append(cvxopt.matrix(f0))
    saved = dict(cvxopt.solvers.options)
    cvxopt.solvers.options.update(_SDP_OPTIONS)
    try:
        sol = cvxopt.solvers.sdp(cvxopt.matrix(sdp.c), Gs=gs, hs=hs)
    except (ZeroDivisionError, ArithmeticError, ValueError) as exc:
        return SdpSolution(
            y=None,
            primal_objective=math.nan,
            dual_objective=math.nan,
            gap=math.inf,
            primal_residual=math.inf,
            dual_residual=math.inf,
            iterations=0,
            status="degraded",
            raw_status=f"solver failure: {exc}",
        )
    finally:
        cvxopt.solvers.options.clear()
        cvxopt.solvers.options.update(saved)
    y = np.array(sol["x"]).reshape(-1) if sol["x"] is not None else None
    gap = float(sol["gap"]) if sol["gap"] is not None else math.inf
    pres = float(sol["primal infeasibility"] or math.inf)
    dres = float(sol["dual infeasibility"] or math.inf)
    converged = (
        sol["status"] == "optimal"
        and gap < GAP_TOL
        and pres < RESIDUAL_TOL
        and dres < RESIDUAL_TOL
    )
    return SdpSolution(
        y=y,
        primal_objective=float(sol["primal objective"]) + sdp.constant
        if sol["primal objective"] is not None
        else math.nan,
        dual_objective=float(sol["dual objective"]) + sdp.constant
        if sol["dual objective"] is not None
        else math.nan,
        gap=gap,
        primal_residual=pres,
        dual_residual=dres,
        iterations=int(sol.get("iterations", 0)),
        status="optimal" if converged else "degraded",
        raw_status=str(sol["status"]),
    )


# ---------------------------------------------------------------------------
# Extraction and local refinement
# ---------------------------------------------------------------------------

@dataclass
class ExtractionResult:
    points: list
    rank_ratio: float
    heuristic: bool


def extract_minimizer(rel: MomentRelaxation, sol: SdpSolution) -> ExtractionResult:
    """First-order moments, certified when the moment matrix is rank one.

    If the second singular value is not negligible the same point is
    still returned but flagged heuristic; downstream local refinement
    absorbs the slack.
    """
    if sol.y is None:
        return ExtractionResult(points=[], rank_ratio=math.inf, heuristic=True)
    m = rel.moment_matrix(sol.y)
    svals = np.linalg.svd(m, compute_uv=False)
    ratio = float(svals[1] / svals[0]) if len(svals) > 1 else 0.0
    point = rel.first_order_moments(sol.y)
    return ExtractionResult(
        points=[point], rank_ratio=ratio, heuristic=ratio >= RANK_RATIO_TOL
    )


def _fd_hessian(grads, x, step=1e-6):
    n = len(x)
    h = np.zeros((n, n))
    for j in range(n):
        xp = x.copy()
        xm = x.copy()
        xp[j] += step
        xm[j] -= step
        for i in range(n):
            h[i, j] = (grads[i].evaluate(xp) - grads[i].evaluate(xm)) / (2 * step)
    return 0.5 * (h + h.T)


def _project_ball(x, radius):
    n = np.linalg.norm(x)
    if n <= radius:
        return x
    return x * (radius / n)


def local_refine(prob: PopProblem, x0, max_iter: int = 500) -> np.ndarray:
    """Projected Armijo descent over the trust ball, Newton near stationarity.

    The iterates stay inside ||x|| <= box_radius: the truncated
    objective is only a faithful surrogate there, and at large norm the
    high-degree polynomial is unbounded below, so unprojected descent
    would escape to spurious far-away minima.
    """
    f = prob.objective
    grads = f.gradient()
    radius = prob.box_radius
    x = _project_ball(np.asarray(x0, dtype=float).copy(), radius)
    if not np.all(np.isfinite(x)):
        raise ValueError("refinement start is not finite")
    fx = f.evaluate(x)
    for _ in range(max_iter):
        g = np.array([gi.evaluate(x) for gi in grads])
        if not np.all(np.isfinite(g)) or not np.isfinite(fx):
            raise RuntimeError(f"non-finite values during refinement at x={x}")
        # projected-gradient stationarity covers both interior points and
        # points pinned to the ball boundary
        pg = x - _project_ball(x - g, radius)
        gnorm = np.max(np.abs(pg)) if len(pg) else 0.0
        if gnorm < GRAD_TOL:
            break
        direction = -g
        # cap the raw gradient step so high-degree objectives cannot
        # launch the line search into overflow territory
        dn = np.linalg.norm(direction)
        if dn > 1.0:
            direction = direction / dn
        if gnorm < 1e-3:
            h = _fd_hessian(grads, x)
            try:
                step_dir = np.linalg.solve(h, -g)
                if np.dot(step_dir, g) < 0:  # descent only
                    direction = step_dir
            except np.linalg.LinAlgError:
                pass
        # Armijo backtracking on the projected step; never accepts an
        # increase.
        t = 1.0
        accepted = False
        for _ in range(60):
            xn = _project_ball(x + t * direction, radius)
            fn = f.evaluate(xn)
            slope = np.dot(g, xn - x)
            if slope < 0 and np.isfinite(fn) and fn <= fx + 1e-4 * slope:
                x, fx = xn, fn
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
    return x


@dataclass
class SolveReport:
    """Joint outcome of the relaxation route and the multistart route."""

    lower_bound: float | None
    relaxation_status: str | None
    extracted_points: list
    rank_ratio: float | None
    heuristic_extraction: bool | None
    refined_point: np.ndarray
    objective_at_refined: float
    objective_at_extracted: float | None
    multistart_k: int
    seed: int

    def to_dict(self):
        return {
            "lower_bound": self.lower_bound,
            "relaxation_status": self.relaxation_status,
            "extracted_points": [list(map(float, p)) for p in self.extracted_points],
            "rank_ratio": self.rank_ratio,
            "heuristic_extraction": self.heuristic_extraction,
            "refined_point": [float(v) for v in self.refined_point],
            "objective_at_refined": float(self.objective_at_refined),
            "objective_at_extracted": self.objective_at_extracted,
            "multistart_k": self.multistart_k,
            "seed": self.seed,
        }


def multistart(
    prob: PopProblem,
    k: int,
    seed: int,
    extra_starts=(),
    max_iter: int = 400,
) -> SolveReport:
    """Best of k refinements from uniform starts in the problem box."""
    if k < 1:
        raise ValueError("need at least one start")
    rng = np.random.default_rng(seed)
    r = prob.box_radius
    starts = [np.asarray(s, dtype=float) for s in extra_starts]
    starts += [rng.uniform(-r, r, size=prob.nvars) for _ in range(k)]
    best_x, best_f = None, math.inf
    for s in starts:
        x = local_refine(prob, s, max_iter=max_iter)
        fx = prob.objective.evaluate(x)
        if fx < best_f:
            best_x, best_f = x, fx
    return SolveReport(
        lower_bound=None,
        relaxation_status=None,
        extracted_points=[],
        rank_ratio=None,
        heuristic_extraction=None,
        refined_point=best_x,
        objective_at_refined=best_f,
        objective_at_extracted=None,
        multistart_k=k,
        seed=seed,
    )


def solve(
    prob: PopProblem,
    relaxation_order: int | None = None,
    relaxation_problem: PopProblem | None = None,
    multistart_k: int = 16,
    seed: int = 0,
    refine_max_iter: int = 400,
    relaxation_ball: bool = True,
) -> SolveReport:
    """Relaxation lower bound plus multistart refinement, cross-validated.

    relaxation_problem may be a lower-degree surrogate of prob (same
    variables); its extraction point warm-starts the refinement of prob.
    The reported bound then certifies the surrogate, not prob, and is
    labelled through relaxation_status.
    """
    rel_prob = relaxation_problem if relaxation_problem is not None else prob
    if relaxation_ball and not rel_prob.constraints:
        rel_prob = with_ball(rel_prob)
    extra = []
    lower = None
    status = None
    ratio = None
    heuristic = None
    extracted = []
    obj_at_extracted = None
    if relaxation_order is not None:
        rel = build_relaxation(rel_prob, relaxation_order)
        sol = solve_sdp(relaxation_sdp(rel))
        lower = sol.primal_objective
        status = sol.status
        ext = extract_minimizer(rel, sol)
        ratio = ext.rank_ratio
        heuristic = ext.heuristic
        extracted = ext.points
        extra = [p for p in ext.points if np.all(np.isfinite(p))]
        if extra:
            obj_at_extracted = float(prob.objective.evaluate(extra[0]))
    report = multistart(
        prob, multistart_k, seed, extra_starts=extra, max_iter=refine_max_iter
    )
    report.lower_bound = lower
    report.relaxation_status = status
    report.extracted_points = extracted
    report.rank_ratio = ratio
    report.heuristic_extraction = heuristic
    report.objective_at_extracted = obj_at_extracted
    return report
