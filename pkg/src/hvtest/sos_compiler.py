"""Compile latent-variable feasibility tests into block-diagonal SDPs.

A model is a polynomial feature map f over a semialgebraic parameter set
K = {x : g_i(x) >= 0}.  Observed statistics y_hat are incompatible with the
model exactly when a hyperplane separates them from the feature image; we
search for one whose nonnegativity on K is witnessed by the identity

    1 - b.f(x) = s_0(x) + sum_i s_i(x) g_i(x)

with every s a sum of squares.  Products g_i*g_j are deliberately not
introduced; the multiplier family is one block per domain polynomial plus
the free block s_0, which keeps block sizes small at the cost of a coarser
relaxation.  Maximizing b.y_hat over such representable hyperplanes gives a
violation test: an optimum above 1 comes with an explicit certificate
(hyperplane plus Gram matrices) that a third party can recheck by
eigendecomposition and pointwise evaluation, with no solver involved.

`bound_observable` runs the same machinery with the hyperplane direction
fixed, returning the least u such that u - c.f is representable; this is an
upper bound on the observable c.f over the model set.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._rand import philox_rng
from .polynomial import ONE, Monomial, MonomialBasis, Polynomial, enumerate_monomials
from .sdp_solver import (
    STATUS_INFEASIBLE,
    STATUS_NEAR,
    STATUS_OPTIMAL,
    SdpProblem,
    SdpSolution,
    SolverOptions,
    solve,
)

log = logging.getLogger(__name__)

ACCEPTED_STATUSES = (STATUS_OPTIMAL, STATUS_NEAR)


class CompileError(ValueError):
    """Raised when a model/degree combination cannot be compiled."""


class DomainError(ValueError):
    """Raised for unusable parameter domains (unbounded box, vanishing volume)."""


class SolverFailure(RuntimeError):
    """Raised when the SDP solver does not reach an accepted status."""

    def __init__(self, status: str, message: str = ""):
        self.status = status
        super().__init__(message or "solver finished with status %r" % status)


class NoBoundAtDegree(SolverFailure):
    """The representation is infeasible at the requested degree."""

    def __init__(self, degree: int):
        self.degree = degree
        super(SolverFailure, self).__init__("no bound at degree %d" % degree)
        self.status = STATUS_INFEASIBLE


@dataclass(frozen=True)
class Tolerances:
    """Certification tolerances, sized for double-precision interior points."""

    eps_psd: float = 1e-7        # Gram eigenvalues may dip this far below 0
    eps_res: float = 1e-6        # sup-norm identity residual over the box
    violation_slack: float = 1e-6  # objective must clear 1 by this much

    def as_dict(self):
        return {"eps_psd": self.eps_psd, "eps_res": self.eps_res,
                "violation_slack": self.violation_slack}


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class ModelSpec:
    """A latent-variable model: parameter domain plus polynomial feature map.

    `domain_polys` cut out K = {x : g_i(x) >= 0}; `box` is the author-asserted
    bounding box of K used for sampling (boundedness is sanity-checked, not
    proven).  `center` records the translation already applied to `features`,
    so raw statistics can be shifted into the same frame.  `var_groups` is an
    optional sparsity hint naming groups of parameters that the features
    couple only weakly; `bound_observable` uses it to cap multiplier bases.
    """

    nvars: int
    domain_polys: Tuple[Polynomial, ...]
    features: Sequence[Polynomial]
    feature_labels: Tuple[str, ...]
    center: Optional[np.ndarray] = None
    box: Optional[Tuple[Tuple[float, float], ...]] = None
    var_groups: Optional[Tuple[Tuple[int, ...], ...]] = None
    name: str = "model"

    def __post_init__(self):
        for g in self.domain_polys:
            if g.nvars != self.nvars:
                raise ValueError("domain polynomial over %d vars in %d-var model"
                                 % (g.nvars, self.nvars))
        if len(self.feature_labels) != len(self.features):
            raise ValueError("feature/label count mismatch")
        if self.box is not None and len(self.box) != self.nvars:
            raise ValueError("box must give one (lo, hi) pair per variable")
        if self.center is not None:
            self.center = np.asarray(self.center, dtype=float)
            if self.center.shape != (len(self.features),):
                raise ValueError("center length must match feature count")

    @property
    def n_features(self) -> int:
        return len(self.features)

    def box_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        box = self.box if self.box is not None else ((0.0, 1.0),) * self.nvars
        lo = np.array([b[0] for b in box], dtype=float)
        hi = np.array([b[1] for b in box], dtype=float)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise DomainError("bounding box must be finite")
        if np.any(hi <= lo):
            raise DomainError("bounding box has empty sides")
        return lo, hi

    def sample_box(self, rng: np.random.Generator, size: int) -> np.ndarray:
        lo, hi = self.box_arrays()
        return lo + (hi - lo) * rng.random((size, self.nvars))

    def in_domain(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        ok = np.ones(pts.shape[0], dtype=bool)
        for g in self.domain_polys:
            ok &= g.eval_many(pts) >= -tol
        return ok

    def feature_values(self, pts: np.ndarray) -> np.ndarray:
        """Feature map at each row of pts, shape (N, n_features)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty((pts.shape[0], self.n_features))
        for j, f in enumerate(self.features):
            out[:, j] = f.eval_many(pts)
        return out


def center_model(spec: ModelSpec, samples: int = 20000, seed: int = 0) -> ModelSpec:
    """Translate features so the origin sits inside the model's convex hull.

    The translation is the Monte-Carlo mean of f over K, estimated by
    rejection sampling from the bounding box.  Deterministic for a fixed
    seed.  Centering matters for the compiled test: with the origin interior
    to the hull, the set of representable hyperplanes is bounded and the
    maximization cannot run off to infinity.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 accepted samples to center")
    rng = philox_rng(seed)
    accepted = []
    tried = 0
    got = 0
    while got < samples:
        chunk = spec.sample_box(rng, max(samples, 20000))
        tried += chunk.shape[0]
        inside = chunk[spec.in_domain(chunk)]
        got += inside.shape[0]
        accepted.append(inside)
        if tried >= 1000 * max(1, samples // 10) and got < 0.001 * tried:
            raise DomainError("rejection rate above 99.9%%: domain too thin "
                              "inside its box (%d of %d accepted)" % (got, tried))
    pts = np.vstack(accepted)[:samples]
    vals = spec.feature_values(pts)
    center = vals.mean(axis=0)
    stderr = vals.std(axis=0, ddof=1) / np.sqrt(samples)
    log.info("center %s estimated from %d samples (max stderr %.2e)",
             np.array_str(center, precision=4), samples, float(stderr.max()))
    shifted = tuple(f.shift_constant(-c) for f, c in zip(spec.features, center))
    total = center if spec.center is None else spec.center + center
    return replace(spec, features=shifted, center=total)


@dataclass
class GramBlock:
    """One SOS multiplier: its basis and, for s_i, the domain polynomial index."""

    label: str
    basis: MonomialBasis
    domain_index: Optional[int] = None  # None marks the free block s_0


@dataclass
class SosProgram:
    """The compiled hyperplane search: max b.target over representable b."""

    model: ModelSpec
    target: np.ndarray
    degree: int
    gram_blocks: List[GramBlock]
    equality_monomials: List[Monomial]
    dropped_multipliers: List[int] = field(default_factory=list)

    @property
    def n_hyperplane(self) -> int:
        return len(self.target)


def _multiplier_blocks(spec: ModelSpec, d: int) -> Tuple[List[GramBlock], List[int]]:
    """Gram blocks for s_0 and every s_i whose basis is nonempty at degree d."""
    blocks = [GramBlock("s0", MonomialBasis(spec.nvars, d // 2))]
    dropped = []
    for i, g in enumerate(spec.domain_polys):
        k = (d - g.degree) // 2
        if k < 0:
            dropped.append(i)
            continue
        blocks.append(GramBlock("s%d" % (i + 1), MonomialBasis(spec.nvars, k),
                                domain_index=i))
    return blocks, dropped


def _identity_rows(spec: ModelSpec, blocks: List[GramBlock],
                   extra_support) -> Tuple[List[Monomial], List[dict]]:
    """Row monomials and per-row Gram triplets for the matching identity.

    A row exists for every monomial that any block product (times its domain
    polynomial) or any polynomial in `extra_support` can produce; per_row[r]
    maps block index -> (ii, jj, vv) entries of the coefficient matrix.
    """
    monos = {ONE}
    for p in extra_support:
        monos.update(p.support())
    products = []  # (block, a, b, row monomial, coefficient), resolved after sorting
    for bidx, blk in enumerate(blocks):
        g = (spec.domain_polys[blk.domain_index]
             if blk.domain_index is not None else None)
        gterms = [(ONE, 1.0)] if g is None else list(g.terms.items())
        entries = blk.basis.entries
        for a in range(len(entries)):
            for b in range(a, len(entries)):
                pair = entries[a] * entries[b]
                for gm, gc in gterms:
                    mono = pair * gm
                    monos.add(mono)
                    products.append((bidx, a, b, mono, gc))
    rows = sorted(monos, key=lambda m: m.grevlex_key(spec.nvars))
    row_of = {m: r for r, m in enumerate(rows)}
    per_row = [{} for _ in rows]
    for bidx, a, b, mono, gc in products:
        tri = per_row[row_of[mono]].setdefault(bidx, ([], [], []))
        tri[0].append(a)
        tri[1].append(b)
        tri[2].append(gc)
    return rows, per_row


def compile(spec: ModelSpec, y_hat, d: int) -> SosProgram:
    """Build the hyperplane-search program at relaxation degree d.

    Equality rows match coefficients of 1 - b.f - s_0 - sum s_i g_i to zero;
    one row exists for every monomial that can appear in the identity.  The
    multiplier bases follow the fixed rule deg(s_0) <= floor(d/2)*2 and
    deg(s_i) basis floor((d - deg g_i)/2); multipliers that would need a
    negative basis degree are dropped with a warning.
    """
    y = np.asarray(y_hat, dtype=float)
    if y.shape != (spec.n_features,):
        raise CompileError("y_hat has length %d, model has %d features"
                           % (y.size, spec.n_features))
    if d < 1:
        raise CompileError("relaxation degree must be >= 1, got %d" % d)
    max_fdeg = max((f.degree for f in spec.features), default=0)
    if d < max_fdeg:
        log.warning("degree %d is below the feature degree %d; the hyperplane "
                    "search is restricted to a degenerate face and may miss "
                    "violations (consider raising the degree)", d, max_fdeg)

    blocks, dropped = _multiplier_blocks(spec, d)
    for i in dropped:
        log.warning("multiplier s%d dropped: deg g%d = %d exceeds degree %d",
                    i + 1, i + 1, spec.domain_polys[i].degree, d)
    if spec.domain_polys and len(dropped) == len(spec.domain_polys):
        raise CompileError(
            "degree %d is below the degree of every domain polynomial "
            "(first offender: g1 with degree %d); no multiplier survives"
            % (d, spec.domain_polys[0].degree))

    rows, _ = _identity_rows(spec, blocks, spec.features)
    target = y if spec.center is None else y - spec.center
    return SosProgram(model=spec, target=target, degree=d, gram_blocks=blocks,
                      equality_monomials=rows, dropped_multipliers=dropped)


def to_sdp(prog: SosProgram) -> SdpProblem:
    """Lower the compiled program to a block-diagonal SDP.

    PSD blocks are the Gram matrices in `gram_blocks` order; free scalars are
    the hyperplane coefficients b; each equality row matches one monomial
    coefficient of the identity.  The map is invertible: primal blocks of a
    solution are the Grams and the free part is b.
    """
    spec = prog.model
    rows, per_row = _identity_rows(spec, prog.gram_blocks, spec.features)
    if rows != prog.equality_monomials:
        raise CompileError("program row set is stale; recompile the model")
    row_of = {m: r for r, m in enumerate(rows)}
    n = prog.n_hyperplane
    prob = SdpProblem([len(blk.basis) for blk in prog.gram_blocks], free_dim=n)

    fcols = np.zeros((len(rows), n))
    for j, f in enumerate(spec.features):
        for mono, c in f.terms.items():
            fcols[row_of[mono], j] = c

    one_row = row_of[ONE]
    for r, bd in enumerate(per_row):
        prob.add_constraint(
            {b: (np.array(ii), np.array(jj), np.array(vv)) for b, (ii, jj, vv) in bd.items()},
            free=fcols[r],
            rhs=1.0 if r == one_row else 0.0,
        )
    prob.set_objective(free=prog.target)
    return prob


@dataclass
class TestCertificate:
    """Solver-independent witness of a (non-)violation.

    `hyperplane` is b in the frame of the spec it was computed against
    (centered if the spec was centered); `gram_matrices` pair each Gram with
    its basis and domain-polynomial index.  `violated` means the objective
    clears 1 by more than the violation slack, i.e. the statistics cannot
    have come from the model (up to the certified tolerances).
    """

    hyperplane: np.ndarray
    objective: float
    gram_matrices: List[Tuple[GramBlock, np.ndarray]]
    residual_sup: float
    min_eig: float
    violated: bool
    degree: int
    tolerances: Tolerances = DEFAULT_TOLERANCES
    center: Optional[np.ndarray] = None
    model_name: str = "model"
    solver_status: str = ""


def _identity_residual(spec: ModelSpec, hyperplane: np.ndarray,
                       grams: List[Tuple[GramBlock, np.ndarray]],
                       pts: np.ndarray) -> np.ndarray:
    """|1 - b.f(x) - sum_blocks z^T Q z * g(x)| at each sample point."""
    vals = np.ones(pts.shape[0])
    vals -= spec.feature_values(pts) @ hyperplane
    for blk, gram in grams:
        z = blk.basis.eval_many(pts)
        s = np.einsum("ki,ij,kj->k", z, gram, z)
        if blk.domain_index is not None:
            s = s * spec.domain_polys[blk.domain_index].eval_many(pts)
        vals -= s
    return np.abs(vals)


@dataclass
class VerificationReport:
    passed: bool
    psd_ok: bool
    residual_ok: bool
    min_eig: float
    residual_sup: float
    samples: int
    tolerances: Tolerances
    notes: List[str] = field(default_factory=list)


def verify_certificate(spec: ModelSpec, cert: TestCertificate,
                       samples: int = 100000, seed: int = 0) -> VerificationReport:
    """Recheck a certificate from scratch: eigenvalues plus identity sampling.

    Sampling covers the whole bounding box, not just K: the identity is a
    polynomial equality, so it must hold everywhere if it holds at all.
    Failures are reported, never raised; a malformed certificate yields a
    failing report with a note.
    """
    tol = cert.tolerances
    notes = []
    try:
        min_eig = np.inf
        for blk, gram in cert.gram_matrices:
            gram = np.asarray(gram, dtype=float)
            if gram.shape != (len(blk.basis), len(blk.basis)):
                raise ValueError("Gram/basis size mismatch in block %s" % blk.label)
            w = np.linalg.eigvalsh(0.5 * (gram + gram.T))
            min_eig = min(min_eig, float(w[0]))
        if not cert.gram_matrices:
            min_eig = 0.0

        rng = philox_rng(seed)
        residual_sup = 0.0
        remaining = int(samples)
        while remaining > 0:
            k = min(remaining, 20000)
            pts = spec.sample_box(rng, k)
            res = _identity_residual(spec, np.asarray(cert.hyperplane, dtype=float),
                                     cert.gram_matrices, pts)
            residual_sup = max(residual_sup, float(res.max()))
            remaining -= k
    except Exception as exc:  # malformed certificates fail, not crash
        return VerificationReport(False, False, False, np.nan, np.nan,
                                  samples, tol, notes=["verification error: %s" % exc])

    psd_ok = min_eig >= -tol.eps_psd
    residual_ok = residual_sup <= tol.eps_res
    if not psd_ok:
        notes.append("Gram matrix eigenvalue %.3e below -eps_psd" % min_eig)
    if not residual_ok:
        notes.append("identity residual %.3e above eps_res" % residual_sup)
    return VerificationReport(psd_ok and residual_ok, psd_ok, residual_ok,
                              min_eig, residual_sup, samples, tol, notes)


def extract_certificate(prog: SosProgram, sol: SdpSolution,
                        samples: int = 20000, seed: int = 0,
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> TestCertificate:
    """Turn an SDP solution back into a self-contained certificate.

    The residual and eigenvalue fields are computed here (a first
    verification pass); `verify_certificate` repeats them independently.
    """
    b = np.asarray(sol.free_values, dtype=float)
    grams = [(blk, 0.5 * (G + G.T)) for blk, G in zip(prog.gram_blocks, sol.primal_blocks)]
    min_eig = min((float(np.linalg.eigvalsh(G)[0]) for _, G in grams), default=0.0)
    rng = philox_rng(seed)
    pts = prog.model.sample_box(rng, samples)
    residual_sup = float(_identity_residual(prog.model, b, grams, pts).max())
    objective = float(b @ prog.target)
    return TestCertificate(
        hyperplane=b,
        objective=objective,
        gram_matrices=grams,
        residual_sup=residual_sup,
        min_eig=min_eig,
        violated=objective > 1.0 + tolerances.violation_slack,
        degree=prog.degree,
        tolerances=tolerances,
        center=None if prog.model.center is None else prog.model.center.copy(),
        model_name=prog.model.name,
        solver_status=sol.status,
    )


def run_test(spec: ModelSpec, y_hat, d: int,
             options: Optional[SolverOptions] = None,
             samples: int = 20000, seed: int = 0,
             tolerances: Tolerances = DEFAULT_TOLERANCES) -> TestCertificate:
    """compile -> to_sdp -> solve -> certificate, raising on solver failure."""
    prog = compile(spec, y_hat, d)
    sol = solve(to_sdp(prog), options)
    if sol.status not in ACCEPTED_STATUSES:
        raise SolverFailure(sol.status, "hyperplane search ended with status %r"
                            % sol.status)
    return extract_certificate(prog, sol, samples=samples, seed=seed,
                               tolerances=tolerances)


def normalized_hyperplane(spec: ModelSpec, b, threshold: float) -> np.ndarray:
    """Rescale a raw test  b.y <= threshold  into the certified form b'.y <= 1.

    Works in the spec's frame: if the spec is centered, the threshold moves
    by b.center before scaling.  Requires the centered threshold positive
    (the hyperplane must actually separate the origin side).
    """
    b = np.asarray(b, dtype=float)
    c = float(threshold)
    if spec.center is not None:
        c = c - float(b @ spec.center)
    if c <= 0:
        raise ValueError("threshold is not positive after centering; "
                         "hyperplane cannot be normalized")
    return b / c


def bound_observable(spec: ModelSpec, c, d: int,
                     options: Optional[SolverOptions] = None) -> float:
    """Least u with  u - c.f(x) = s_0 + sum s_i g_i  at degree d.

    Always an upper bound for c.f over the model set; nonincreasing in d.
    The Gram degree is padded up to cover deg(c.f) (below that the identity
    cannot hold for any u), and rounded up to even; the caller's d adds
    strength beyond that floor.  When the spec declares `var_groups`, the
    bases are additionally capped per group at half the observable's group
    degree, a restriction that can only loosen the bound, never break its
    validity.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (spec.n_features,):
        raise ValueError("observable has length %d, model has %d features"
                         % (c.size, spec.n_features))
    # accumulate c.f in one dict: features can be numerous (4^T for chain
    # models) and repeated Polynomial addition would copy the sum each time
    acc = {}
    for cj, f in zip(c, spec.features):
        if cj == 0.0:
            continue
        for mono, v in f.terms.items():
            acc[mono] = acc.get(mono, 0.0) + float(cj) * v
    target = Polynomial(spec.nvars, acc)

    D = max(2 * ((int(d) + 1) // 2), 2 * ((target.degree + 1) // 2), 2)

    group_half = None
    if spec.var_groups:
        group_half = []
        for group in spec.var_groups:
            gdeg = max((sum(m.exponent(v) for v in group) for m in target.support()),
                       default=0)
            group_half.append((tuple(group), (2 * ((gdeg + 1) // 2)) // 2))

    def capped(total: int, g: Optional[Polynomial]) -> MonomialBasis:
        entries = enumerate_monomials(spec.nvars, total)
        if group_half is not None:
            lims = []
            for group, half in group_half:
                lim = half
                if g is not None:
                    gdeg_g = max((sum(mm.exponent(v) for v in group)
                                  for mm in g.support()), default=0)
                    lim = max(0, (2 * half - gdeg_g) // 2)
                lims.append((group, lim))
            entries = [m for m in entries
                       if all(sum(m.exponent(v) for v in group) <= lim
                              for group, lim in lims)]
        return MonomialBasis(spec.nvars, total, entries)

    blocks = [GramBlock("s0", capped(D // 2, None))]
    for i, g in enumerate(spec.domain_polys):
        k = (D - g.degree) // 2
        if k < 0:
            log.warning("bound: multiplier s%d dropped at degree %d", i + 1, D)
            continue
        blocks.append(GramBlock("s%d" % (i + 1), capped(k, g), domain_index=i))

    rows, per_row = _identity_rows(spec, blocks, [target])
    row_of = {m: r for r, m in enumerate(rows)}
    prob = SdpProblem([len(blk.basis) for blk in blocks], free_dim=1)
    one_row = row_of[ONE]
    for r, bd in enumerate(per_row):
        mono = rows[r]
        prob.add_constraint(
            {b: (np.array(ii), np.array(jj), np.array(vv)) for b, (ii, jj, vv) in bd.items()},
            free=np.array([-1.0 if r == one_row else 0.0]),
            rhs=-target.coeff(mono),
        )
    prob.set_objective(free=np.array([-1.0]))

    sol = solve(prob, options)
    if sol.status == STATUS_INFEASIBLE:
        raise NoBoundAtDegree(d)
    if sol.status not in ACCEPTED_STATUSES:
        raise SolverFailure(sol.status, "observable bound ended with status %r"
                            % sol.status)
    return float(-sol.objective_value)


# ---- certificate serialization ----
#
# A certificate file is self-contained: hyperplane, Gram lower triangles,
# bases as exponent lists, tolerances, and the verification summary.  A
# third party needs only the model file and this file to re-verify.

def certificate_to_dict(cert: TestCertificate) -> dict:
    blocks = []
    for blk, gram in cert.gram_matrices:
        n = len(blk.basis)
        lower = [float(gram[i, j]) for i in range(n) for j in range(i + 1)]
        blocks.append({
            "label": blk.label,
            "domain_index": blk.domain_index,
            "basis": [list(m.dense(blk.basis.nvars)) for m in blk.basis.entries],
            "gram_lower": lower,
        })
    return {
        "format": "hvtest-certificate",
        "version": 1,
        "model": cert.model_name,
        "degree": cert.degree,
        "hyperplane": [float(v) for v in cert.hyperplane],
        "objective": float(cert.objective),
        "violated": bool(cert.violated),
        "center": None if cert.center is None else [float(v) for v in cert.center],
        "tolerances": cert.tolerances.as_dict(),
        "residual_sup": float(cert.residual_sup),
        "min_eig": float(cert.min_eig),
        "solver_status": cert.solver_status,
        "blocks": blocks,
    }


def certificate_from_dict(data: dict) -> TestCertificate:
    if data.get("format") != "hvtest-certificate":
        raise ValueError("not a certificate file")
    blocks = []
    for rec in data["blocks"]:
        exps = rec["basis"]
        nvars = len(exps[0]) if exps else 0
        basis = MonomialBasis(nvars, 0, [Monomial.from_dense(e) for e in exps])
        n = len(basis)
        gram = np.zeros((n, n))
        it = iter(rec["gram_lower"])
        for i in range(n):
            for j in range(i + 1):
                v = next(it)
                gram[i, j] = gram[j, i] = v
        blocks.append((GramBlock(rec["label"], basis, rec["domain_index"]), gram))
    tol = Tolerances(**data["tolerances"])
    center = data.get("center")
    return TestCertificate(
        hyperplane=np.array(data["hyperplane"], dtype=float),
        objective=float(data["objective"]),
        gram_matrices=blocks,
        residual_sup=float(data["residual_sup"]),
        min_eig=float(data["min_eig"]),
        violated=bool(data["violated"]),
        degree=int(data["degree"]),
        tolerances=tol,
        center=None if center is None else np.array(center, dtype=float),
        model_name=data.get("model", "model"),
        solver_status=data.get("solver_status", ""),
    )


def save_certificate(path: str, cert: TestCertificate) -> None:
    with open(path, "w") as fh:
        json.dump(certificate_to_dict(cert), fh, indent=1)
        fh.write("\n")


def load_certificate(path: str) -> TestCertificate:
    with open(path) as fh:
        return certificate_from_dict(json.load(fh))
