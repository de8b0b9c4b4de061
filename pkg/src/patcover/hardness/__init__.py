"""Grid CSP to Hamiltonian path reduction and its gadget checks."""
from .csp import CspInstance, brute_force_csp, format_csp, parse_csp, random_csp, snake_order
from .gadgets import (HIGH, LOW, Lattice, Tube, TwoChain, attach_gadget_edge, attach_or_check,
                      build_tube, build_two_chain)
from .reduction import ReductionOutput, construct_witness_path, default_spacing, reduce_csp
from .search import (brute_force_ham_cycle, brute_force_ham_path, enumerate_ham_paths,
                     validate_ham_cycle, validate_ham_path)
from .claims import verify_gadgets
