# schemas.py

import logging
import math
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

logger = logging.getLogger("chshlab.schemas")


# Single-game analysis
class BlockSummary(BaseModel):
    theta: float
    weight: float
    padded: bool = False


class RigidityReport(BaseModel):
    correlation: float
    epsilon: float
    m_residual: float
    extended_correlation: float
    alice_x_residual: float
    bob_x_residual: float
    state_residual: float
    alice_blocks: List[BlockSummary] = []
    bob_blocks: List[BlockSummary] = []
    padded: bool = False


class ExtendedRigidityReport(BaseModel):
    structured_gap: float
    subgames: Dict[str, RigidityReport]
    degenerate: List[str] = []
    alice_x_residual: float
    alice_y_residual: float
    bob_x_residual: float
    bob_z_residual: float
    bob_y_residual: float
    state_residual: float
    delta_overlap: float
    rounding_residual: float


# Sequential games
class SimulationReport(BaseModel):
    device_gaps: Dict[str, List[float]]
    max_gap: float
    weak_gaps: List[float]
    weak_gap: float


class GameRecord(BaseModel):
    round: int
    a: int
    b: int
    x: int
    y: int
    win: int

    def line(self) -> str:
        return f"round={self.round} a={self.a} b={self.b} x={self.x} y={self.y} win={self.win}"


class RefereeVerdict(BaseModel):
    games_won: int
    games: int
    threshold: float
    accepted: bool
    seed: int


class SelfTestParams(BaseModel):
    rhs: float
    n_star: Optional[float] = None
    log_N: Optional[float] = None
    N: Optional[int] = None
    degenerate: bool = False


# Tomography
class TomographyRecord(BaseModel):
    round: int
    recipient: str
    question: str
    answer: str

    def line(self) -> str:
        return (
            f"round={self.round} recipient={self.recipient} "
            f"question={self.question} answer={self.answer}"
        )


class TauRecord(BaseModel):
    o: int
    pauli: str
    tau: float


class TomographyVerdict(BaseModel):
    kind: str
    accepted: bool
    count_gap: Optional[float] = None
    count_threshold: Optional[float] = None
    tau_gap: Optional[float] = None
    tau_threshold: Optional[float] = None
    mismatches: int = 0


class ProbePoint(BaseModel):
    eps: float
    max_distance: float
    witness_found: bool


class ProbeReport(BaseModel):
    q: int
    restarts: int
    points: List[ProbePoint]
    exponent: Optional[float] = None


# Teleportation
class EquivalenceReport(BaseModel):
    mode: str
    total_variation: float
    tolerance: float
    passed: bool
    teleported: Dict[str, float]
    direct: Dict[str, float]
    blocks_used: int


# Protocol harness
SUBPROTOCOLS = ("chsh", "state", "process", "compute")


class ProtocolConfig(BaseModel):
    """
    Parameters of one protocol instance.

    Sub-protocol probabilities left unset default to (1 − δ)/3 each for the first three and δ
    for the computation. With paper_scale the asymptotic constraints are enforced; such a
    configuration is only ever printed, never run.
    """

    alpha: float = Field(16.0, gt=0)
    n: int = Field(32, ge=1, description="rounds Alice spends on process tomography or the computation")
    q: Literal[11] = 11
    n_s: int = Field(64, ge=1, description="gadget blocks per set")
    N: int = Field(4, ge=1, description="sets of CHSH games")
    m: int = Field(16, ge=1, description="workspace qubits available to the verification circuit")
    delta: float = Field(0.25, gt=0, lt=1)
    p_chsh: Optional[float] = None
    p_state: Optional[float] = None
    p_process: Optional[float] = None
    p_compute: Optional[float] = None
    seed: int = 0
    paper_scale: bool = False

    @model_validator(mode="after")
    def check_parameters(self) -> "ProtocolConfig":
        rest = (1 - self.delta) / 3
        for name in ("p_chsh", "p_state", "p_process"):
            if getattr(self, name) is None:
                setattr(self, name, rest)
        if self.p_compute is None:
            self.p_compute = self.delta
        probabilities = self.probabilities()
        if any(p < 0 or p > 1 for p in probabilities.values()):
            raise ValueError(f"sub-protocol probabilities must lie in [0, 1], got {probabilities}")
        if abs(sum(probabilities.values()) - 1) > 1e-12:
            raise ValueError(f"sub-protocol probabilities sum to {sum(probabilities.values())!r}, not 1")
        if 2 * self.n > self.q * self.n_s:
            raise ValueError(f"Alice's {self.n} two-index rounds need 2n ≤ q·n_s = {self.q * self.n_s}")

        if self.paper_scale:
            required = 1 / (6 * self.n ** (self.alpha / 8))
            if abs(self.delta - required) > 1e-12 * max(1.0, required):
                raise ValueError(f"paper scale needs δ = 1/(6 n^(α/8)) = {required:.3e}, got {self.delta}")
            log_needed = (self.alpha - 1) * math.log(self.q * self.n_s)
            if math.log(self.N) < log_needed:
                raise ValueError(f"paper scale needs N ≥ (q·n_s)^(α−1) = e^{log_needed:.1f}, got N = {self.N}")
        else:
            logger.warning(
                f"⚠️ desk-scale run (n={self.n}, n_s={self.n_s}, N={self.N}): "
                "the asymptotic soundness guarantees are not claimed at this scale"
            )
        return self

    def probabilities(self) -> Dict[str, float]:
        return dict(zip(SUBPROTOCOLS, (self.p_chsh, self.p_state, self.p_process, self.p_compute)))


class PaperScale(BaseModel):
    """Parameter sizes the asymptotic analysis asks for, as base-10 logarithms where they overflow"""

    n: int
    alpha: float
    q: int = 11
    delta: float
    log10_n_s: float
    log10_N_min: float
    log10_games: float
    alpha_min: float


class MessageRecord(BaseModel):
    round: int
    direction: str = Field(description="E2A, A2E, E2B, B2E, E2P or P2E")
    payload: List[str]

    def line(self) -> str:
        return f"round={self.round} dir={self.direction} payload={' '.join(self.payload)}"


class RunLog(BaseModel):
    subprotocol: str
    K: int
    seed: int
    messages: List[MessageRecord] = []
    accepted: bool = False
    details: Dict[str, float] = {}
    error: Optional[str] = None

    def lines(self) -> List[str]:
        return [m.line() for m in self.messages]


class TranscriptComparison(BaseModel):
    name: str
    mode: str = "exact"
    total_variation: float
    state_gap: float = 0.0
    p_value: Optional[float] = None
    equal: bool
    support: int
