from omv_tools.apps.cnf import CnfHandle, cnf_eval
from omv_tools.apps.codes import SubsetCodes, subset_codes
from omv_tools.apps.graph import GraphHandle, SetQueryMode, set_query, triangle_query
from omv_tools.apps.partial_match import PartialMatchIndex, pm_build, pm_query

__all__ = [
    "CnfHandle",
    "cnf_eval",
    "SubsetCodes",
    "subset_codes",
    "GraphHandle",
    "SetQueryMode",
    "set_query",
    "triangle_query",
    "PartialMatchIndex",
    "pm_build",
    "pm_query",
]
