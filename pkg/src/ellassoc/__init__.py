"""Computer algebra and numerics for elliptic/ellipsitomic associators:
finitely presented graded Lie algebras, associator relation systems,
Grothendieck-Teichmuller group laws, twisted Eisenstein series, and the
numerical monodromy of the two-point twisted KZB connection."""

from .series import (Alphabet, COMPLEX, ContractViolation, DomainError,
                     Generator, NCSeries, RATIONAL, bch, coproduct_defect,
                     primitivity_defect)
from .presentations import (GammaSpec, GradedQuotient, Presentation,
                            build_preset, chart_certified_free,
                            comparison_morphism, gamma_action, get_preset,
                            insertion, preset_quotient, symmetric_action)
from .gt import (AssociatorCandidate, EllipsitomicCandidate, GroupLike,
                 GRTElement, GRTEllElement, GTElement, GTEllElement,
                 ResidualReport, TwistedGroupElement, candidate_from_json,
                 candidate_to_json, check_cd_identities, check_elliptic,
                 check_ellipsitomic, check_ellipsitomic_bis, check_hexagons,
                 check_pentagon, ell_grt_act, ell_gt_act, grt_act,
                 grt_ell_check, grt_mul, grt_scale, gt_act, gt_mul,
                 trivial_associator, trivial_ellipsitomic)
from .modular import (A_bar, A_s_gamma_closed, A_s_gamma_taylor, G_s_gamma,
                      PoleError, QSeries, TorsionPoint, check_modularity,
                      eisenstein_E, eisenstein_E_qseries, eisenstein_G, eta,
                      hurwitz_zeta, riemann_zeta, theta, theta_log_deriv,
                      weierstrass_p)
from .monodromy import (ConvergenceError, Conventions, HolonomyResult,
                        KZBKernel, kz_associator, kzb_pair, temzv_extract)

__version__ = "0.1.0"
