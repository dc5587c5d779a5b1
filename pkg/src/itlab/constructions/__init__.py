"""Host graphs and the (n,k,r,s)-graphs built from them."""

from itlab.constructions.geometry import norm_graph, projective_incidence
from itlab.constructions.hosts import (
    BipartiteHost,
    HostCertificate,
    norm_graph_host,
    projective_plane_host,
    random_bipartite_host,
)
from itlab.constructions.instances import (
    ConstructionNotImplemented,
    assemble_upper_bound_instance,
    neighbourhood_incidence_graph,
    pad_to_nkrs,
    random_nkrs,
)

__all__ = [
    "BipartiteHost",
    "ConstructionNotImplemented",
    "HostCertificate",
    "assemble_upper_bound_instance",
    "neighbourhood_incidence_graph",
    "norm_graph",
    "norm_graph_host",
    "pad_to_nkrs",
    "projective_incidence",
    "projective_plane_host",
    "random_bipartite_host",
    "random_nkrs",
]
