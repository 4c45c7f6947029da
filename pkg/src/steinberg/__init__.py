"""Exact computations with Steinberg idempotents over prime fields: group
algebra calculus, flag complex homology, graded classifying-space modules,
and fixed-point decompositions of finite p-group homomorphism sets."""

from .algebra import (AlgebraElement, FiniteGroup, Integers, MatModule,
                      PermModule, PLocalRationals, PrimeField, ZZ, act,
                      block_tensor, borel_sum, gl_group, shuffle_sum,
                      signed_permutation_sum, steinberg_constant,
                      unipotent_block_sum)
from .complexes import (build_flag_complex, chain_complex, cycles_check,
                        diamond_steinberg_cycle, export_chain_complex,
                        flag_homology, homology, join_product_check,
                        parabolic_span_check, p_subgroups_up_to_conjugacy,
                        steinberg_cycle, top_homology_module_check,
                        transverse_basis_check, transverse_flags,
                        unipotent_fixed_check)
from .gf import (GFMatrix, Subspace, block_embed, bruhat_factor,
                 enumerate_group, enumerate_subspaces, gaussian_binomial,
                 general_linear, gl_order, stiefel)
from .idempotent import (SteinbergIdempotent, assoc_check, comm_check,
                         coinvariants_iso_check, conjugate_iso_check,
                         conjugate_steinberg_idempotent, fp_reduction_matches,
                         idempotency_check, product_identity_check,
                         retraction_check, steinberg_idempotent,
                         steinberg_lemma_check, steinberg_module_exact,
                         summand, summand_rank, summand_rank_mod)
from .pgroups import (PGroup, GroupHom, contractible_summand_report, cyclic,
                      dihedral8, direct_product, elementary_abelian,
                      enumerate_homs, fixed_point_decomposition_check,
                      fixed_point_index, frattini_family, from_cayley_file,
                      heisenberg, hom_partition_check, named_group,
                      product_compatibility_check, quaternion8)
from .torus import (GradedModule, kunneth, steinberg_dim_series,
                    stiefel_module, stiefel_rank_check, torus_homology,
                    trivial_graded)
from .checks import CheckReport, REGISTRY, run_check, run_suite

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
