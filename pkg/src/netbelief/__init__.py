"""Belief tracking for condition/event nets.

An observer who only sees whether attempted transitions succeed or fail
keeps a probability distribution over the hidden marking.  The package
maintains that belief two ways: as an explicit joint vector (`dense`) and
as a modular Bayesian network updated by local graph surgery (`mbn` /
`update`), with a workbench for random nets, interactive sessions, a
benchmark harness, a CLI, and an HTTP session service.
"""

from .nets import (
    EnabledStatus,
    FireOutcome,
    Marking,
    Net,
    OutcomeKind,
    TieBreakPolicy,
    Transition,
    enabled_status,
    fire,
    make_net,
)
from .dense import Dist, assert_dist, nassert_dist, observe_dist, set_dist
from .matrices import MatrixClass, StochMatrix, classify, compose, tensor
from .graphs import CausalityGraph, Generator, InPort, decompose, isomorphic
from .mbn import Mbn, ObnCertificate, evaluate, is_obn, marginal
from .update import (
    NormalizationReport,
    UpdateStrategy,
    eliminate_hidden_node,
    insert_assert,
    insert_nassert,
    insert_set,
    matrix_to_mbn,
    normalize,
    observe_mbn,
    reverse_arc,
    rewrite_fixpoint,
    simplify,
    split_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "CausalityGraph",
    "Dist",
    "EnabledStatus",
    "FireOutcome",
    "Generator",
    "InPort",
    "Marking",
    "MatrixClass",
    "Mbn",
    "Net",
    "NormalizationReport",
    "ObnCertificate",
    "OutcomeKind",
    "StochMatrix",
    "TieBreakPolicy",
    "Transition",
    "UpdateStrategy",
    "assert_dist",
    "classify",
    "compose",
    "decompose",
    "eliminate_hidden_node",
    "enabled_status",
    "evaluate",
    "fire",
    "insert_assert",
    "insert_nassert",
    "insert_set",
    "is_obn",
    "isomorphic",
    "make_net",
    "marginal",
    "matrix_to_mbn",
    "nassert_dist",
    "normalize",
    "observe_dist",
    "observe_mbn",
    "reverse_arc",
    "rewrite_fixpoint",
    "set_dist",
    "simplify",
    "split_matrix",
    "tensor",
]
