"""Right-trivialized jets of Lie-group-valued maps and their groupoid structure."""
from .connection import ChristoffelGerm, TensorFieldGerm, covariant_derivative
from .germ import (
    MatrixGerm,
    germ_inverse,
    germ_multiply,
    germ_partial,
    random_group_germ,
    sample_exp_germ,
    trivialize_covariant,
    trivialize_flat,
    xi_multi,
)
from .jets import (
    TrivializedJet,
    check_image_k2,
    identity_jet,
    inverse,
    multiply,
    multiply_via_counts,
)
from .lie import MatrixGroup
from .partitions import Partition, enumerate_antilex, enumerate_p1plus
from .tensor import GValuedTensor

__version__ = "0.1.0"
