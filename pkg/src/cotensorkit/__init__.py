"""Exact computations with coalgebras over the rationals: wedge filtrations,
cotensor coalgebras and the universal morphism D̃ → T^c_D(D²/D)."""
from .coalg import (A_quiver, Coalgebra, CoalgebraMap, Quiver, Subcoalgebra, branched_quiver,
                    build, divided_power, grouplike, ground_field, path_coalgebra,
                    subcoalgebra, subcoalgebra_from_span, validate)
from .comod import Comodule, cotensor, cotensor_map, cotensor_power, regular
from .cotensorcoalg import (CotensorModel, GradedCotensorCoalgebra, phi_recursion_check,
                            relation_table_check, super_phi_check, universal_morphism)
from .exactla import LinMap, Space
from .filtration import WedgeFiltration, compute_filtration
from .homcheck import (Verdict, condition4, coseparable, formally_smooth, i_injective_bicomodule,
                       i_injective_left, i_injective_right, theorem_verdict)
from .identities import identity_suite
from .wedge import eta, snake, wedge

__version__ = "0.1.0"
