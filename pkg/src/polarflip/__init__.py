"""Polar-code flip decoding with restart mechanisms and latency models."""

from polarflip.channel import ChannelConfig, transmit
from polarflip.construction import (
    CrcSpec,
    PolarCode,
    build_code,
    crc_attach,
    crc_check,
    nr_code,
    nr_reliability,
    polar_encode,
)
from polarflip.cost import CostParams, memory_estimate, restart_saving, trial_cost
from polarflip.estimator import PolarFlipDecoder
from polarflip.fast import decode_special_node, fssc_trial
from polarflip.flip import FlipConfig, FlipDecoder, decode_frame
from polarflip.restart import RestartSpec, plan_restart
from polarflip.sc import DecodeOutcome, LlrWorkspace, sc_trial
from polarflip.schedule import NodeSchedule, build_schedule

__all__ = [
    "ChannelConfig",
    "transmit",
    "CrcSpec",
    "PolarCode",
    "build_code",
    "crc_attach",
    "crc_check",
    "nr_code",
    "nr_reliability",
    "polar_encode",
    "CostParams",
    "memory_estimate",
    "restart_saving",
    "trial_cost",
    "PolarFlipDecoder",
    "decode_special_node",
    "fssc_trial",
    "FlipConfig",
    "FlipDecoder",
    "decode_frame",
    "RestartSpec",
    "plan_restart",
    "DecodeOutcome",
    "LlrWorkspace",
    "sc_trial",
    "NodeSchedule",
    "build_schedule",
]
