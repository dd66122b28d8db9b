from .handover import HandoverDecision, a3_holds, evaluate_a3
from .kpi_log import KPI_COLUMNS, KpiCsvWriter
from .radio import pathloss_db, rate_per_rb_bits, rsrp_dbm, rsrp_matrix
from .scheduler import Allocation, schedule_tti
from .simulator import (DETACHED, BsState, KpiReport, NetworkSimulator, Observation,
                        SimParams, UeState, observation, rbu_expectation)
from .topology import NetworkTopology, linear_layout, place_ues, rbg_sizes

__all__ = [
    "Allocation", "BsState", "DETACHED", "HandoverDecision", "KPI_COLUMNS", "KpiCsvWriter",
    "KpiReport", "NetworkSimulator", "NetworkTopology", "Observation", "SimParams", "UeState",
    "a3_holds", "evaluate_a3", "linear_layout", "observation", "pathloss_db", "place_ues",
    "rate_per_rb_bits", "rbg_sizes", "rbu_expectation", "rsrp_dbm", "rsrp_matrix", "schedule_tti",
]
