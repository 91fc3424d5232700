"""Surface groups, regular finite covers and lifted homology actions."""

from .cover import CoverData, LiftedAction, build_cover, deck_action, lift_action, restriction_check
from .quotients import FiniteQuotient, mod_k_cover, parse_quotient, parse_quotient_list, trivial_quotient, validate_quotient
from .snf import SmithForm, smith_normal_form
from .words import (SurfaceAutomorphism, SurfacePresentation, Word, homology_action, identity_automorphism,
                    parse_automorphism, surface_presentation, transvection, validate_automorphism)
from .fixtures import builtin, builtin_names, pseudo_anosov, twist, twist_corpus
from .table import GrowthRow, growth_table, table_csv
