from __future__ import annotations

import logging

from numpy.typing import ArrayLike

from morseig.classify.classification import (
    Borderline,
    Classification,
    Diagnostics,
    NonDegenerateCritical,
    NotCovered,
    Regular,
    SmoothCritical,
)
from morseig.classify.conditions import (
    NHolds,
    RegularCertified,
    check_condition_N,
    check_regular,
    check_transversality,
)
from morseig.config.morseig_env import DEFAULT_OPTIONS, AnalysisOptions
from morseig.errors import MorseigError
from morseig.families.matrix_family import MatrixFamily
from morseig.polyalg.fields import s_codim
from morseig.polyalg.morse_poly import nonsmooth_contribution, z2_contribution
from morseig.spectral.branch_derivatives import branch_hessian
from morseig.spectral.eig_clusters import cluster_at
from morseig.spectral.h_operator import complement_basis, h_operator
from morseig.spectral.self_adjoint import eig_sorted
from morseig.stratum.extremum import extremum_classify
from morseig.stratum.stratum_chart import classify_hessian, stratum_chart

log = logging.getLogger(__name__)


def classify_point(
    fam: MatrixFamily, x: ArrayLike, k: int, opts: AnalysisOptions = DEFAULT_OPTIONS
) -> Classification:
    """
    Verdict for the branch `lambda_k` at `x`:

    - simple eigenvalue: `Regular` if the gradient is nonzero, else `SmoothCritical` with the
      Morse index of the Hessian;
    - multiple eigenvalue: `Regular` if the range of the compression map holds a definite
      matrix; else, if condition (N) and transversality hold, the point is located on its
      stratum and is `NonDegenerateCritical` when the restricted Hessian is non-degenerate;
    - anything else is `Borderline`, or `NotCovered` when the theory does not apply
      (`d < s(nu)`, or the restriction to the stratum is degenerate).
    """
    pt = fam.point(x)
    spec = eig_sorted(fam(pt))
    c = cluster_at(spec, k, opts.tol_cluster)
    h = h_operator(fam, pt, c)
    value = float(spec.eigenvalues[k - 1])
    rank = h.rank(opts.rank_tol)
    comp_dim = len(complement_basis(h, opts.rank_tol))

    def done(verdict, **diag) -> Classification:
        diagnostics = Diagnostics(
            nu=c.nu,
            rel_index=c.rel_index,
            rank=rank,
            complement_dim=comp_dim,
            isolation=c.isolation,
            **diag,
        )
        return Classification(point=pt, k=k, value=value, verdict=verdict, diagnostics=diagnostics)

    reg = check_regular(h, opts)
    margin = reg.margin if isinstance(reg, RegularCertified) else reg.best_margin

    if c.nu == 1:
        if isinstance(reg, RegularCertified):
            regular = Regular(witness_direction=reg.witness, margin=reg.margin)
            return done(regular, definite_margin=margin)
        hess = classify_hessian(branch_hessian(fam, pt, k), opts)
        return done(
            SmoothCritical(
                mu=hess.mu, nondegenerate=hess.nondegenerate, hessian_eigs=hess.eigenvalues
            ),
            definite_margin=margin,
        )

    if isinstance(reg, RegularCertified):
        regular = Regular(witness_direction=reg.witness, margin=reg.margin)
        return done(regular, definite_margin=margin)

    cond_n = check_condition_N(h, opts)
    transversal = check_transversality(h, fam.field, opts)
    n_margin = cond_n.margin if isinstance(cond_n, NHolds) else None
    codim = s_codim(c.nu, fam.field)

    if isinstance(cond_n, NHolds) and transversal:
        try:
            chart = stratum_chart(fam, pt, k, opts, cluster=c)
        except MorseigError as e:
            log.warning("Stratum analysis failed at %s (k=%s): %s", pt, k, e)
            return done(
                NotCovered(reason=f"stratum analysis failed: {e}"),
                definite_margin=margin,
                condition_n_margin=n_margin,
                transversal=transversal,
            )
        diag = dict(
            definite_margin=margin,
            condition_n_margin=n_margin,
            transversal=transversal,
            kernel_angle=chart.kernel_angle,
            stratum_residual=chart.residual_norm,
        )
        if not chart.nondegenerate:
            reason = "condition (S) fails: degenerate restriction to the stratum"
            return done(NotCovered(reason=reason), **diag)
        i, mu = c.rel_index, chart.mu
        return done(
            NonDegenerateCritical(
                nu=c.nu,
                rel_index=i,
                mu=mu,
                contribution=nonsmooth_contribution(c.nu, i, fam.field).shift(mu),
                z2_poly=z2_contribution(c.nu, i, mu, fam.field),
                extremum=extremum_classify(c.nu, i, mu, chart.tangent_dim),
                tangent_dim=chart.tangent_dim,
            ),
            **diag,
        )

    diag = dict(definite_margin=margin, condition_n_margin=n_margin, transversal=transversal)
    if fam.d < codim:
        return done(
            NotCovered(reason=f"excessive multiplicity: d={fam.d} < s(nu)={codim}"),
            **diag,
        )
    b = cond_n.b
    if isinstance(cond_n, NHolds):
        reason = "non-transverse"
    else:
        reason = f"condition (N) fails: {cond_n.reason}"
    return done(Borderline(complement_matrix=b, reason=reason), **diag)
