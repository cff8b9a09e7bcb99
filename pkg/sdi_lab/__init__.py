"""
Main import point for sdilab.
"""
from sdi_lab.attacks import AttackScenario, attack_3tolog6, verify_proposition3
from sdi_lab.audit import Auditor, EventLog, audit
from sdi_lab.classical_model import ClassicalMembership, classical_membership
from sdi_lab.core import ClickTable, ConditionalDistribution, ScenarioDims
from sdi_lab.errors import SDILabError
from sdi_lab.quantum import qrac2_protocol, qrac3_protocol, quantum_statistics
from sdi_lab.rac import RACSpec, success_report
from sdi_lab.reproduce import AcceptanceSuite
from sdi_lab.scenario import (
    DLScenario,
    MeasurementBox,
    PreparationBox,
    simulate_dl,
    simulate_dl_full,
    simulate_ideal,
)

__all__ = (
    "ScenarioDims",
    "ConditionalDistribution",
    "ClickTable",
    "PreparationBox",
    "MeasurementBox",
    "DLScenario",
    "simulate_ideal",
    "simulate_dl_full",
    "simulate_dl",
    "ClassicalMembership",
    "classical_membership",
    "qrac2_protocol",
    "qrac3_protocol",
    "quantum_statistics",
    "RACSpec",
    "success_report",
    "AttackScenario",
    "attack_3tolog6",
    "verify_proposition3",
    "Auditor",
    "EventLog",
    "audit",
    "AcceptanceSuite",
    "SDILabError",
)
