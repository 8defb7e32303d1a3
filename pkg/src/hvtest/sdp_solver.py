"""Dense primal-dual interior-point solver for block-diagonal SDPs with free variables.

Problem form (maximization):

    max  sum_b <C_b, X_b> + q.u
    s.t. sum_b <A_jb, X_b> + F[j,:].u = rhs_j   for each constraint j
         X_b >= 0 (PSD),  u free

with dual

    min  rhs.y
    s.t. S_b = sum_j y_j A_jb - C_b >= 0,   F^T y = q.

The solver is an infeasible-start path-following method with an HKM search
direction and Mehrotra predictor-corrector, dense Schur complement, and free
variables eliminated through the Schur system rather than split into PSD
scalars.  All block and constraint sizes here are small (hundreds), so dense
factorizations are used throughout and runs are deterministic for a fixed
problem ordering.

A presolve pass drops linearly dependent constraint rows (with a logged
warning) and checks the dropped rows for consistency; an inconsistent
dependent row makes the problem infeasible without running the iteration.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

log = logging.getLogger(__name__)

STATUS_OPTIMAL = "optimal"
STATUS_NEAR = "near-optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_MAXITER = "max-iterations"
STATUS_NUMERICAL = "numerical-failure"


@dataclass
class SolverOptions:
    """Tolerances and iteration limits for solve()."""
    tol_gap: float = 1e-7        # relative duality gap
    tol_feas: float = 1e-7       # relative primal/dual feasibility
    max_iter: int = 200
    step_frac: float = 0.98      # fraction of the max step to the boundary
    seed: int = 0                # accepted for interface parity; the method is deterministic
    verbose: bool = False


@dataclass
class SdpSolution:
    status: str
    objective_value: float
    primal_blocks: list
    free_values: np.ndarray
    dual: np.ndarray             # multipliers y, one per original constraint row
    duality_gap: float
    iterations: int = 0
    # one record per accepted iteration: mu, gap, pobj, dobj, pinf, dinf, sigma, alpha_p, alpha_d
    iterate_log: list = field(default_factory=list)
    dropped_rows: list = field(default_factory=list)
    messages: list = field(default_factory=list)


class SdpProblem:
    """Block-diagonal SDP data in constraint-list form.

    Coefficient matrices are given per PSD block as dense symmetric arrays or
    as (i, j, value) triplet arrays over the lower or upper triangle; triplets
    are mirrored automatically.  Blocks absent from a constraint are zero.
    """

    def __init__(self, block_dims, free_dim=0):
        self.block_dims = tuple(int(n) for n in block_dims)
        if any(n <= 0 for n in self.block_dims):
            raise ValueError("block dimensions must be positive")
        self.free_dim = int(free_dim)
        self._rows = []          # list of (blocks: dict, free: array, rhs: float)
        self._c_blocks = {}
        self._q = np.zeros(self.free_dim)

    @property
    def n_constraints(self):
        return len(self._rows)

    def _as_block(self, b, mat):
        n = self.block_dims[b]
        if isinstance(mat, tuple) and len(mat) == 3:
            ii, jj, vv = (np.asarray(a) for a in mat)
            dense = np.zeros((n, n))
            dense[ii, jj] = vv
            dense[jj, ii] = vv
            return dense
        dense = np.asarray(mat, dtype=float)
        if dense.shape != (n, n):
            raise ValueError("block %d expects shape (%d, %d), got %r" % (b, n, n, dense.shape))
        if not np.allclose(dense, dense.T, atol=1e-12):
            raise ValueError("block %d coefficient matrix is not symmetric" % b)
        return 0.5 * (dense + dense.T)

    def _as_triplets(self, b, mat):
        """Constraint rows are kept as mirrored (i, j, value) triplets so that
        large sparse programs never materialize dense per-row matrices."""
        n = self.block_dims[b]
        if isinstance(mat, tuple) and len(mat) == 3:
            ii, jj, vv = (np.asarray(a) for a in mat)
            ii = ii.astype(np.int32, copy=False)
            jj = jj.astype(np.int32, copy=False)
            vv = vv.astype(float, copy=False)
            if len(ii) and (ii.max() >= n or jj.max() >= n or ii.min() < 0 or jj.min() < 0):
                raise ValueError("block %d triplet index out of range" % b)
            off = ii != jj
            return (np.concatenate([ii, jj[off]]), np.concatenate([jj, ii[off]]),
                    np.concatenate([vv, vv[off]]))
        dense = self._as_block(b, mat)
        ii, jj = np.nonzero(dense)
        return ii.astype(np.int32), jj.astype(np.int32), dense[ii, jj]

    def add_constraint(self, blocks, free=None, rhs=0.0):
        bd = {int(b): self._as_triplets(int(b), m) for b, m in blocks.items()}
        fv = np.zeros(self.free_dim)
        if free is not None:
            fv[:] = np.asarray(free, dtype=float)
        self._rows.append((bd, fv, float(rhs)))

    def set_objective(self, blocks=None, free=None):
        self._c_blocks = {int(b): self._as_block(int(b), m) for b, m in (blocks or {}).items()}
        self._q = np.zeros(self.free_dim)
        if free is not None:
            self._q[:] = np.asarray(free, dtype=float)

    # ---- assembled views used by the solver ----

    def _assemble(self):
        m = self.n_constraints
        nb = len(self.block_dims)
        mats = []            # per block: CSR (m, n*n) of row-major vecs
        for b, n in enumerate(self.block_dims):
            rr, cc, vals = [], [], []
            for r, (bd, _, _) in enumerate(self._rows):
                if b in bd:
                    ii, jj, vv = bd[b]
                    rr.append(np.full(len(ii), r, dtype=np.int64))
                    cc.append(ii.astype(np.int64) * n + jj)
                    vals.append(vv)
            if rr:
                coo = sp.coo_matrix((np.concatenate(vals),
                                     (np.concatenate(rr), np.concatenate(cc))),
                                    shape=(m, n * n))
                mats.append(coo.tocsr())
            else:
                mats.append(sp.csr_matrix((m, n * n)))
        F = np.array([fv for _, fv, _ in self._rows]).reshape(m, self.free_dim)
        rhs = np.array([r for _, _, r in self._rows])
        C = [self._c_blocks.get(b, np.zeros((n, n))) for b, n in enumerate(self.block_dims)]
        return mats, F, rhs, C, self._q.copy()


def _sym(a):
    return 0.5 * (a + a.T)


def _chol_psd(mat, retries=4):
    """Cholesky with escalating diagonal regularization; None if it never succeeds."""
    scale = max(np.max(np.abs(mat)), 1.0)
    for k in range(retries + 1):
        try:
            return sla.cholesky(mat if k == 0 else mat + (scale * 10.0 ** (-14 + 2 * k)) * np.eye(mat.shape[0]),
                                lower=True)
        except sla.LinAlgError:
            continue
    return None


def _max_step(L, delta):
    """Largest alpha with  M + alpha*delta >= 0, via M = L L^T congruence."""
    w = sla.solve_triangular(L, delta, lower=True)
    w = sla.solve_triangular(L, w.T, lower=True)
    lam = sla.eigvalsh(_sym(w))
    lo = lam[0]
    if lo >= -1e-14:
        return np.inf
    return -1.0 / lo


class _Ops:
    """Linear maps A(.), A^T(.), and the Schur complement for one assembled problem."""

    def __init__(self, block_dims, mats):
        self.block_dims = block_dims
        self.mats = mats
        self.m = mats[0].shape[0] if mats else 0
        # per-block row structure for the large-block Schur route
        self.struct = []
        for b, n in enumerate(block_dims):
            csr = mats[b].tocoo()
            per = [None] * self.m
            order = np.argsort(csr.row, kind="stable")
            rows, cols, vals = csr.row[order], csr.col[order], csr.data[order]
            splits = np.searchsorted(rows, np.arange(self.m + 1))
            for k in range(self.m):
                s, e = splits[k], splits[k + 1]
                if s == e:
                    continue
                ii, jj = cols[s:e] // n, cols[s:e] % n
                per[k] = (ii, jj, vals[s:e], np.unique(jj))
            self.struct.append(per)

    def apply(self, X):
        out = np.zeros(self.m)
        for b, Xb in enumerate(X):
            out += self.mats[b] @ Xb.ravel()
        return out

    def apply_t(self, y):
        return [_sym((self.mats[b].T @ y).reshape(n, n))
                for b, n in enumerate(self.block_dims)]

    def schur(self, X, Sinv):
        M = np.zeros((self.m, self.m))
        for b, n in enumerate(self.block_dims):
            if self.mats[b].nnz == 0:
                continue
            if n <= 64:
                M += self._schur_dense(b, X[b], Sinv[b])
            else:
                M += self._schur_sparse(b, X[b], Sinv[b])
        return _sym(M)

    def _schur_dense(self, b, Xb, Sib):
        n = self.block_dims[b]
        csr = self.mats[b]
        M = np.zeros((self.m, self.m))
        chunk = max(1, int(2e6) // (n * n))
        for s in range(0, self.m, chunk):
            e = min(self.m, s + chunk)
            Ak = np.asarray(csr[s:e].todense()).reshape(e - s, n, n)
            P = np.einsum("ij,cjk,kl->cil", Xb, Ak, Sib, optimize=True)
            M[:, s:e] = csr @ P.reshape(e - s, n * n).T
        return M

    def _schur_sparse(self, b, Xb, Sib):
        n = self.block_dims[b]
        csr = self.mats[b]
        M = np.zeros((self.m, self.m))
        per = self.struct[b]
        for k in range(self.m):
            if per[k] is None:
                continue
            ii, jj, vv, cols = per[k]
            ncol = len(cols)
            pos = np.searchsorted(cols, jj)
            Y = np.zeros((n, ncol))
            np.add.at(Y.T, pos, vv[:, None] * Xb[:, ii].T)
            P = Y @ Sib[cols, :]
            M[:, k] = csr @ P.ravel()
        return M


def _presolve_rows(mats, F, rhs, tol=1e-9):
    """Rank-filter constraint rows; returns (kept, dropped, ok, row_norms).

    Works on the Gram matrix of the scaled rows so the row vectors themselves
    (which can be long) are never stacked densely.  Dropped rows are checked
    for consistency against the kept ones through the same Gram system.
    """
    m = F.shape[0]
    norms = np.sqrt(sum(np.asarray(mt.multiply(mt).sum(axis=1)).ravel() for mt in mats)
                    + np.sum(F * F, axis=1))
    norms[norms == 0] = 1.0
    D = sp.diags(1.0 / norms)
    G = (F / norms[:, None]) @ (F / norms[:, None]).T
    for mt in mats:
        B = D @ mt
        G += (B @ B.T).toarray()
    G = _sym(G)
    # pivoted Cholesky reveals the numerical rank and a well-conditioned row subset
    c, piv, rank, _ = sla.lapack.dpstrf(G, tol=tol * max(1.0, np.max(np.diag(G))), lower=True)
    piv = piv - 1
    kept = sorted(piv[:rank].tolist())
    dropped = sorted(piv[rank:].tolist())
    ok = True
    if dropped:
        Gkk = G[np.ix_(kept, kept)] + 1e-13 * np.eye(len(kept))
        lam = np.linalg.solve(Gkk, G[np.ix_(kept, dropped)])
        resid = (rhs / norms)[dropped] - lam.T @ (rhs / norms)[kept]
        # a dependent row whose right-hand side disagrees makes the system inconsistent
        row_err = G[np.ix_(dropped, dropped)] - G[np.ix_(dropped, kept)] @ lam
        good = np.abs(np.diag(row_err)) <= 1e-6
        ok = bool(np.all(np.abs(resid[good]) <= 1e-7 * (1 + np.abs((rhs / norms)[dropped][good]))))
    return kept, dropped, ok, norms


def _ray_certificates(ops, mats, F, rhs_s, C, q_red, dims, p_red, X, y, u):
    """Classify a failed run by checking the final iterate for a Farkas ray.

    A dual ray y with sum_j y_j A_jb >= 0 on every block, F^T y = 0 and
    rhs.y < 0 proves the primal infeasible; a primal ray Z >= 0 (plus a free
    component) with A(Z) + F u = 0 and <C, Z> + q.u > 0 proves it unbounded.
    Both are tested on the normalized final iterate.  The primal candidate
    gets one least-squares correction toward the constraint null space and an
    eigenvalue clip before the residual test.  Returns (status, message) or
    None.  Thresholds are absolute because constraint rows arrive here
    unit-normalized.
    """
    yn = np.linalg.norm(y)
    if yn > 1e-6:
        yhat = y / yn
        if p_red:
            w = np.linalg.lstsq(F, yhat, rcond=None)[0]
            yhat = yhat - F @ w
            nn = np.linalg.norm(yhat)
            yhat = yhat / nn if nn > 1e-6 else None
        if yhat is not None:
            Aty = ops.apply_t(yhat)
            mineig = min(sla.eigvalsh(_sym(Ab))[0] for Ab in Aty)
            slope = float(rhs_s @ yhat)
            if mineig >= -1e-8 and slope <= -1e-6:
                return STATUS_INFEASIBLE, ("dual ray certifies primal infeasibility "
                                           "(rhs.y = %.3e on the unit ray)" % slope)

    xn = np.sqrt(sum(np.sum(Xb * Xb) for Xb in X))
    if xn > 1e-6:
        Z = [Xb / xn for Xb in X]
        uz = u / xn
        r = ops.apply(Z) + (F @ uz if p_red else 0.0)
        G = sum(mt @ mt.T for mt in mats).toarray()
        if p_red:
            G = G + F @ F.T
        w = np.linalg.lstsq(G, r, rcond=None)[0]
        Atw = ops.apply_t(w)
        Z = [Z[b] - Atw[b] for b in range(len(dims))]
        if p_red:
            uz = uz - F.T @ w
        mineig = 0.0
        Zc = []
        for Zb in Z:
            lam, V = np.linalg.eigh(_sym(Zb))
            mineig = min(mineig, float(lam[0]))
            Zc.append(V @ np.diag(np.maximum(lam, 0.0)) @ V.T)
        if mineig >= -1e-6:
            r2 = ops.apply(Zc) + (F @ uz if p_red else 0.0)
            slope = sum(float(np.tensordot(C[b], Zc[b])) for b in range(len(dims)))
            if p_red:
                slope += float(q_red @ uz)
            cnorm = 1.0 + np.sqrt(sum(np.sum(Cb * Cb) for Cb in C))
            if np.linalg.norm(r2) <= 1e-6 and slope >= 1e-5 * cnorm:
                return STATUS_UNBOUNDED, ("primal ray certifies an unbounded objective "
                                          "(slope %.3e on the unit ray)" % slope)
    return None


def solve(prob, opts=None):
    """Run the interior-point iteration; returns an SdpSolution.

    Deterministic for a fixed problem: the initial iterate is identity-scaled
    from data norms and no randomness enters the path.
    """
    opts = opts or SolverOptions()
    mats_all, F_all, rhs_all, C, q = prob._assemble()
    dims = prob.block_dims
    m_all = len(rhs_all)
    p = prob.free_dim
    if m_all == 0:
        raise ValueError("problem has no constraints")

    kept, dropped, consistent, _ = _presolve_rows(mats_all, F_all, rhs_all)
    if dropped:
        log.warning("dropped %d linearly dependent constraint row(s): %s",
                    len(dropped), dropped[:12])
    sol_msgs = []
    if dropped:
        sol_msgs.append("dropped dependent rows: %d" % len(dropped))
    if not consistent:
        return SdpSolution(STATUS_INFEASIBLE, np.nan, [np.zeros((n, n)) for n in dims],
                           np.zeros(p), np.zeros(m_all), np.nan,
                           dropped_rows=dropped,
                           messages=sol_msgs + ["dependent rows have inconsistent right-hand sides"])

    mats = [mt[kept] for mt in mats_all]
    F = F_all[kept]
    rhs = rhs_all[kept]
    m = len(kept)

    # free-variable columns must be independent for the reduced Schur system;
    # a null direction with nonzero objective slope is an unbounded ray
    free_keep = list(range(p))
    if p > 0:
        qr_r, qr_p = sla.qr(F, mode="r", pivoting=True)
        diag = np.abs(np.diag(qr_r))[: min(m, p)]
        frank = int(np.sum(diag > 1e-10 * max(1.0, diag[0] if len(diag) else 1.0)))
        if frank < p:
            ns = sla.null_space(F)
            slope = ns.T @ q
            if np.any(np.abs(slope) > 1e-9 * max(1.0, np.linalg.norm(q))):
                return SdpSolution(STATUS_UNBOUNDED, np.inf, [np.zeros((n, n)) for n in dims],
                                   np.zeros(p), np.zeros(m_all), np.nan, dropped_rows=dropped,
                                   messages=sol_msgs + ["free directions with unbounded objective"])
            free_keep = sorted(qr_p[:frank].tolist())
            sol_msgs.append("fixed %d dependent free column(s) to zero" % (p - frank))
            F = F[:, free_keep]
    q_red = q[free_keep]
    p_red = len(free_keep)

    # row scaling: unit 2-norm rows in the scaled system
    norms = np.sqrt(sum(np.asarray(mt.multiply(mt).sum(axis=1)).ravel() for mt in mats)
                    + np.sum(F * F, axis=1))
    norms[norms == 0] = 1.0
    Dinv = sp.diags(1.0 / norms)
    mats = [Dinv @ mt for mt in mats]
    F = F / norms[:, None]
    rhs_s = rhs / norms

    ops = _Ops(dims, mats)
    ntot = sum(dims)
    cnorm = max([1.0] + [np.max(np.abs(Cb)) for Cb in C])
    tau_p = 10.0 * max(1.0, np.max(np.abs(rhs_s)))
    tau_d = 10.0 * max(1.0, cnorm, np.max(np.abs(q_red)) if p_red else 0.0)
    X = [tau_p * np.eye(n) for n in dims]
    S = [tau_d * np.eye(n) for n in dims]
    y = np.zeros(m)
    u = np.zeros(p_red)

    def inner(A, B):
        return sum(float(np.tensordot(a, b)) for a, b in zip(A, B))

    rhs_norm = 1.0 + np.linalg.norm(rhs_s)
    cnorm_f = 1.0 + np.sqrt(sum(np.sum(Cb * Cb) for Cb in C))
    qnorm = 1.0 + np.linalg.norm(q_red)

    itlog = []
    status = STATUS_MAXITER
    best = np.inf
    best_merit = np.inf
    best_state = None
    stall = 0
    it = 0
    for it in range(1, opts.max_iter + 1):
        AX = ops.apply(X)
        r_p = rhs_s - AX - (F @ u if p_red else 0.0)
        Aty = ops.apply_t(y)
        R_d = [Aty[b] - C[b] - S[b] for b in range(len(dims))]
        r_f = q_red - F.T @ y if p_red else np.zeros(0)
        gap = inner(X, S)
        mu = gap / ntot
        pobj = inner(C, X) + (q_red @ u if p_red else 0.0)
        dobj = rhs_s @ y
        pinf = np.linalg.norm(r_p) / rhs_norm
        dinf = max(np.sqrt(sum(np.sum(R * R) for R in R_d)) / cnorm_f,
                   (np.linalg.norm(r_f) / qnorm) if p_red else 0.0)
        relgap = gap / (1.0 + 0.5 * (abs(pobj) + abs(dobj)))
        itlog.append(dict(mu=mu, gap=gap, pobj=pobj, dobj=dobj, pinf=pinf, dinf=dinf))
        if opts.verbose:
            log.info("it %2d  gap %9.2e  pinf %8.1e  dinf %8.1e  pobj % .8e", it, gap, pinf, dinf, pobj)
        if relgap <= opts.tol_gap and pinf <= opts.tol_feas and dinf <= opts.tol_feas:
            status = STATUS_OPTIMAL
            break
        # divergence heuristics: an infeasible primal pushes the dual objective
        # to -inf; an unbounded primal pushes the primal objective to +inf
        dscale = max(1.0, abs(itlog[0]["dobj"]))
        if dobj < -1e9 * dscale and dinf <= 1e-6:
            status = STATUS_INFEASIBLE
            break
        if pobj > 1e9 * max(1.0, abs(itlog[0]["pobj"])) and pinf <= 1e-6:
            status = STATUS_UNBOUNDED
            break
        # price equality-constraint drift in objective units: to first order
        # the primal objective is off by y.r_p, so a tiny scaled pinf with a
        # large multiplier still counts against the iterate
        obj_err = abs(float(y @ r_p)) / (1.0 + 0.5 * (abs(pobj) + abs(dobj)))
        merit = max(relgap, pinf, dinf, obj_err)
        if merit < best_merit:
            best_merit = merit
            best_state = ([Xb.copy() for Xb in X], [Sb.copy() for Sb in S],
                          y.copy(), u.copy())
        if merit < 0.9 * best:
            best, stall = min(best, merit), 0
        else:
            stall += 1
        if stall >= 20:
            status = STATUS_MAXITER
            break

        Lx = [_chol_psd(Xb) for Xb in X]
        Ls = [_chol_psd(Sb) for Sb in S]
        if any(L is None for L in Lx + Ls):
            status = STATUS_NUMERICAL
            break
        Sinv = [sla.cho_solve((L, True), np.eye(L.shape[0])) for L in Ls]
        Sinv = [_sym(Si) for Si in Sinv]

        M = ops.schur(X, Sinv)
        Lm = _chol_psd(M)
        if Lm is None:
            status = STATUS_NUMERICAL
            break

        def msolve(v):
            return sla.cho_solve((Lm, True), v)

        if p_red:
            MF = msolve(F)
            Gf = F.T @ MF
            Lg = _chol_psd(_sym(Gf))
            if Lg is None:
                status = STATUS_NUMERICAL
                break

        def direction(sigma_mu, K):
            # h = A(sigma_mu*Sinv - X - X R_d Sinv - K Sinv) - r_p
            W = []
            for b in range(len(dims)):
                T = sigma_mu * Sinv[b] - X[b] - X[b] @ R_d[b] @ Sinv[b]
                if K is not None:
                    T = T - K[b] @ Sinv[b]
                W.append(T)
            h = ops.apply(W) - r_p
            if p_red:
                du = sla.cho_solve((Lg, True), r_f - F.T @ msolve(h))
                dy = msolve(h + F @ du)
            else:
                du = np.zeros(0)
                dy = msolve(h)
            Atdy = ops.apply_t(dy)
            dS = [Atdy[b] + R_d[b] for b in range(len(dims))]
            dX = []
            for b in range(len(dims)):
                T = sigma_mu * Sinv[b] - X[b] - X[b] @ dS[b] @ Sinv[b]
                if K is not None:
                    T = T - K[b] @ Sinv[b]
                dX.append(_sym(T))
            return dX, du, dy, dS

        dXa, dua, dya, dSa = direction(0.0, None)
        ap = min(1.0, min((_max_step(Lx[b], dXa[b]) for b in range(len(dims))), default=np.inf))
        ad = min(1.0, min((_max_step(Ls[b], dSa[b]) for b in range(len(dims))), default=np.inf))
        mu_aff = inner([X[b] + ap * dXa[b] for b in range(len(dims))],
                       [S[b] + ad * dSa[b] for b in range(len(dims))]) / ntot
        sigma = min(1.0, max((mu_aff / mu) ** 3, 1e-8))

        K = [dXa[b] @ dSa[b] for b in range(len(dims))]
        dX, du, dy, dS = direction(sigma * mu, K)

        def try_step(dX, du, dy, dS):
            ap = min(1.0, opts.step_frac * min((_max_step(Lx[b], dX[b]) for b in range(len(dims))), default=np.inf))
            ad = min(1.0, opts.step_frac * min((_max_step(Ls[b], dS[b]) for b in range(len(dims))), default=np.inf))
            for _ in range(25):
                gnew = inner([X[b] + ap * dX[b] for b in range(len(dims))],
                             [S[b] + ad * dS[b] for b in range(len(dims))])
                if gnew <= gap * (1 + 1e-12):
                    return ap, ad, gnew
                ap *= 0.5
                ad *= 0.5
            return None

        step = try_step(dX, du, dy, dS)
        if step is None:
            # fall back to the affine direction, whose gap derivative at zero
            # step is strictly negative
            dX, du, dy, dS = dXa, dua, dya, dSa
            step = try_step(dX, du, dy, dS)
            if step is None:
                status = STATUS_NUMERICAL
                break
        ap, ad, _ = step
        itlog[-1].update(sigma=sigma, alpha_p=ap, alpha_d=ad)

        X = [_sym(X[b] + ap * dX[b]) for b in range(len(dims))]
        u = u + ap * du
        y = y + ad * dy
        S = [_sym(S[b] + ad * dS[b]) for b in range(len(dims))]

    if status in (STATUS_MAXITER, STATUS_NUMERICAL):
        found = _ray_certificates(ops, mats, F, rhs_s, C, q_red, dims, p_red, X, y, u)
        if found is not None:
            ray_status, msg = found
            obj = np.nan if ray_status == STATUS_INFEASIBLE else np.inf
            return SdpSolution(ray_status, obj, [np.zeros((n, n)) for n in dims],
                               np.zeros(p), np.zeros(m_all), np.nan, iterations=it,
                               iterate_log=itlog, dropped_rows=dropped,
                               messages=sol_msgs + [msg])

    if status in (STATUS_MAXITER, STATUS_NEAR, STATUS_NUMERICAL) and best_state is not None:
        # return the best iterate seen, not the one the loop died on
        X, S, y, u = best_state
        if status != STATUS_NEAR and best_merit <= 1e4 * max(opts.tol_gap, opts.tol_feas):
            sol_msgs.append("terminated early at a nearly converged iterate")
            status = STATUS_NEAR

    pobj = inner(C, X) + (q_red @ u if p_red else 0.0)
    dobj = rhs_s @ y
    y_full = np.zeros(m_all)
    y_full[kept] = y / norms
    u_full = np.zeros(p)
    if p_red:
        u_full[free_keep] = u
    return SdpSolution(status, pobj, X, u_full, y_full, abs(dobj - pobj),
                       iterations=it, iterate_log=itlog, dropped_rows=dropped,
                       messages=sol_msgs)


def residuals(prob, sol):
    """Recompute (primal_infeas, dual_infeas, gap) for a solution, from scratch.

    primal_infeas is the plain 2-norm of rhs - A(X) - F u; dual_infeas is the
    larger of ||F^T y - q|| and the most negative eigenvalue of A^T(y) - C;
    gap is |primal objective - dual objective|.
    """
    mats, F, rhs, C, q = prob._assemble()
    ops = _Ops(prob.block_dims, mats)
    X = sol.primal_blocks
    u = sol.free_values
    y = sol.dual
    r_p = rhs - ops.apply(X) - (F @ u if prob.free_dim else 0.0)
    Aty = ops.apply_t(y)
    dneg = 0.0
    for b in range(len(prob.block_dims)):
        lam = sla.eigvalsh(Aty[b] - C[b])
        dneg = max(dneg, max(0.0, -lam[0]))
    r_f = np.linalg.norm(F.T @ y - q) if prob.free_dim else 0.0
    pobj = sum(float(np.tensordot(C[b], X[b])) for b in range(len(C)))
    pobj += float(q @ u) if prob.free_dim else 0.0
    dobj = float(rhs @ y)
    return float(np.linalg.norm(r_p)), float(max(r_f, dneg)), abs(pobj - dobj)


# ---- SDPA sparse format ----------------------------------------------------
#
# The exported file follows the widely used convention: the dual there reads
# min c.y s.t. sum_i y_i F_i - F_0 >= 0, which matches this module's dual with
# F_i the constraint blocks and F_0 the objective blocks.  Free variables are
# written as a trailing diagonal block holding paired +/- entries, a standard
# encoding third-party solvers accept.

def write_sdpa(prob, path):
    mats, F, rhs, C, q = prob._assemble()
    dims = list(prob.block_dims)
    p = prob.free_dim
    blocks = dims + ([-2 * p] if p else [])
    with open(path, "w") as fh:
        fh.write("%d\n%d\n" % (prob.n_constraints, len(blocks)))
        fh.write(" ".join(str(d) for d in blocks) + "\n")
        fh.write(" ".join(repr(float(v)) for v in rhs) + "\n")

        def emit(mat_idx, blk, i, j, v):
            if v != 0.0:
                fh.write("%d %d %d %d %r\n" % (mat_idx, blk, i + 1, j + 1, float(v)))

        for b, Cb in enumerate(C):
            for i, j in zip(*np.nonzero(np.triu(Cb))):
                emit(0, b + 1, i, j, Cb[i, j])
        for k in range(p):
            emit(0, len(dims) + 1, k, k, q[k])
            emit(0, len(dims) + 1, p + k, p + k, -q[k])
        for r in range(prob.n_constraints):
            bd, fv, _ = prob._rows[r]
            for b, (ii, jj, vv) in bd.items():
                for i, j, v in zip(ii, jj, vv):
                    if i <= j:
                        emit(r + 1, b + 1, int(i), int(j), v)
            for k in range(p):
                emit(r + 1, len(dims) + 1, k, k, fv[k])
                emit(r + 1, len(dims) + 1, p + k, p + k, -fv[k])


def read_sdpa(path):
    """Parse an SDPA sparse file without free-variable conventions applied."""
    with open(path) as fh:
        toks = []
        header = []
        for line in fh:
            line = line.split("*")[0].split('"')[0]
            if line.startswith(("#",)):
                continue
            parts = line.replace(",", " ").replace("(", " ").replace(")", " ").replace("{", " ").replace("}", " ").split()
            if not parts:
                continue
            if len(header) < 3:
                header.append(parts)
            else:
                toks.append(parts)
    m = int(header[0][0])
    dims = [int(v) for v in header[2]]
    if any(d < 0 for d in dims):
        raise ValueError("diagonal blocks in input are not supported by the reader")
    rhs = [float(v) for v in toks[0]]
    prob = SdpProblem(dims, free_dim=0)
    rows = [dict() for _ in range(m)]
    obj = {}
    for parts in toks[1:]:
        k, b, i, j, v = int(parts[0]), int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3]) - 1, float(parts[4])
        store = obj if k == 0 else rows[k - 1]
        blk = store.setdefault(b, np.zeros((dims[b], dims[b])))
        blk[i, j] = v
        blk[j, i] = v
    prob.set_objective(blocks=obj)
    for k in range(m):
        prob.add_constraint(rows[k], rhs=rhs[k])
    return prob
