"""Slice-based free-space connectivity for planar rigid objects.

Obstacles and the object are unions of equal-radius disks.  The
orientation circle is cut into slices; in each slice the free space of a
slightly shrunk object is decomposed with an alpha complex, and adjacent
slices are stitched into a graph.  Disconnection and caging verdicts read
off that graph are proofs; "possibly connected" is not.
"""

from .connectivity import ConnectivityGraph, QueryResult, Verdict, Vertex, query_caged, query_path
from .errors import (CagemapError, CellNotFree, DegenerateInput, EmptyApproximation,
                     EpsilonTooLarge, InputError, NoFiniteWidth, PreconditionError)
from .geom import (Configuration, Disk, DiskUnion, Point, Polygon, RigidObject,
                   approximate_polygon, in_collision, signed_distance)
from .metrics import (INFINITE, PassageReport, component_volume, delta_connected,
                      passage_width, volume_report)
from .oracle import GridSpec, oracle_connected, oracle_volume, rasterize
from .pipeline import FreeSpaceMap, build_map
from .slicing import SliceApprox, epsilon_core, partition_so2

__version__ = "0.1.0"

__all__ = [
    "CagemapError", "CellNotFree", "Configuration", "ConnectivityGraph", "DegenerateInput",
    "Disk", "DiskUnion", "EmptyApproximation", "EpsilonTooLarge", "FreeSpaceMap", "GridSpec",
    "INFINITE", "InputError", "NoFiniteWidth", "PassageReport", "Point", "Polygon",
    "PreconditionError", "QueryResult", "RigidObject", "SliceApprox", "Verdict", "Vertex",
    "approximate_polygon", "build_map", "component_volume", "delta_connected", "epsilon_core",
    "in_collision", "oracle_connected", "oracle_volume", "partition_so2", "passage_width",
    "query_caged", "query_path", "rasterize", "signed_distance", "volume_report",
]
