"""Positive steady states of mass-action networks with few complexes.

Counts come from Gale dual systems: the steady-state equations are
rewritten as a few equations in a few variables on a polyhedral cone,
and for the one-reaction families the count reduces to the real roots of
one univariate polynomial on an interval, found with exact Sturm chains.
"""

__version__ = "0.1.0"

from .network import (FamilyKind, FamilyTag, NetworkError, NetworkSyntaxError, ReactionNetwork,
                      detect_family, family_network, mass_action_system, parse_network)

__all__ = ["FamilyKind", "FamilyTag", "NetworkError", "NetworkSyntaxError", "ReactionNetwork",
           "__version__", "detect_family", "family_network", "mass_action_system", "parse_network"]
