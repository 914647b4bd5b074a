"""sclforge: exact arithmetic for commutator-length bounds.

Free-group power words, small-cancellation relator families with a piece
checker, van Kampen diagrams on surfaces with combinatorial curvature,
bound certificates with a semi-decision search, and right-computable
approximation streams. Everything is exact (big integers and fractions).
"""

__version__ = "0.1.0"

from .words import (
    Alphabet,
    AlphabetError,
    CyclicWord,
    Generator,
    PowerWord,
    WordSyntaxError,
    commutator,
    is_cyclically_reduced,
    max_common_piece,
    parse_word,
    print_word,
    reduce,
)
from .presentations import (
    FamilyParams,
    PiecesReport,
    Presentation,
    PresentationError,
    SeqPair,
    SequenceError,
    block_exponent,
    check_small_cancellation,
    commutator_block,
    family_alphabet,
    family_presentation,
    family_relator,
    parse_presentation,
    print_presentation,
    triple_commutator_block,
)
from .rc_numbers import (
    CutEnumerator,
    MembershipOracle,
    MonotoneApprox,
    add_approx,
    cut_to_monotone,
    rational_approx,
    specker_cut,
    specker_partial,
)
from .diagrams import (
    CurvatureReport,
    Dart,
    Diagnostics,
    DiagramError,
    Disk,
    Markers,
    SurfaceDiagram,
    boundary_degree,
    branch_bound_check,
    branch_weight_disk,
    branch_weight_path,
    branch_weight_vertex,
    chi_minus,
    claims_check,
    contact_weight,
    curvature,
    curvature_report,
    diagram_scl_upper,
    disjoint_union,
    euler_characteristic,
    gauss_bonnet_check,
    normalized,
    parse_diagram,
    print_diagram,
    subdivide_dart,
    total_curvature,
)
from .bounds import (
    BUDGET_EXHAUSTED,
    HALT,
    BoundAtom,
    BoundComm,
    BoundDerivation,
    BoundInverse,
    BoundPower,
    BoundProduct,
    CertificateError,
    CommutatorCertificate,
    RelatorFactor,
    SearchConfig,
    SearchResult,
    cl_search,
    derive_bound,
    family_scl_bound,
    family_upper_certificate,
    parse_certificate,
    print_certificate,
    scl_report,
    verify_certificate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
