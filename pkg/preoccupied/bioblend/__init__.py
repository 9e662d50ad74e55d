# This library is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This library is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this library; if not, see <http://www.gnu.org/licenses/>.

"""
preoccupied.bioblend

Bale scheduling for biomass preprocessing lines under uncertain
carbohydrate content

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from .casedata import CaseData, CasePaths, ingest_case_data
from .config import RunConfig, load_config, profile_path
from .errors import (
    BoundsError, CaseDataError, ConfigError, HorizonError, SequenceError,
    SolverError)
from .metrics import MetricsRow, compute_metrics
from .milp import MilpInstance, VariantSpec, add_blending, build_core
from .model import (
    BaleClass, BaleGeometry, ReliabilitySpec, SequencePlan, SolutionRecord,
    expand_sequence)
from .network import EquipmentNode, ProcessNetwork, validate_network
from .oracle import oracle_solve
from .runner import RunReport, prepare, run
from .saa import (
    BoundCertificate, ScenarioBuilder, lower_bound, solve_penalty,
    upper_bound, violation_rate)
from .sampling import EmpiricalDist, SampleSet, sample
from .sequencing import (
    BaleInventory, Ordering, inventory_counts, load_literal_sequence,
    random_sequence, realize, rule1_moisture, rule2_quality,
    rule3_distance, rule4_combined)
from .solver import (
    BackendConfig, SolveRequest, SolveResult, SolveStatus, check_solution,
    solve)


__all__ = (
    "BoundsError",
    "CaseDataError",
    "ConfigError",
    "HorizonError",
    "SequenceError",
    "SolverError",

    "BaleClass",
    "BaleGeometry",
    "ReliabilitySpec",
    "SequencePlan",
    "SolutionRecord",
    "expand_sequence",

    "EquipmentNode",
    "ProcessNetwork",
    "validate_network",

    "MilpInstance",
    "VariantSpec",
    "add_blending",
    "build_core",

    "BackendConfig",
    "SolveRequest",
    "SolveResult",
    "SolveStatus",
    "check_solution",
    "oracle_solve",
    "solve",

    "EmpiricalDist",
    "SampleSet",
    "sample",

    "BoundCertificate",
    "ScenarioBuilder",
    "lower_bound",
    "solve_penalty",
    "upper_bound",
    "violation_rate",

    "BaleInventory",
    "Ordering",
    "inventory_counts",
    "load_literal_sequence",
    "random_sequence",
    "realize",
    "rule1_moisture",
    "rule2_quality",
    "rule3_distance",
    "rule4_combined",

    "CaseData",
    "CasePaths",
    "ingest_case_data",

    "MetricsRow",
    "RunConfig",
    "RunReport",
    "compute_metrics",
    "load_config",
    "prepare",
    "profile_path",
    "run",
)


# The end.
