"""
Simulated MPC-assisted execution of a mechanism.

Miners run the sharing protocol over a synchronous network: identity
agreement, committed shares with an attestation of consistency, private
openings, ok/complain votes, public complaint responses, and finally the
inputs to the ideal functionality F_TFM, which reconstructs every bid
from the openings that match the broadcast commitments and applies the
mechanism. Identities caught misbehaving bid 0.

Honest parties act first in every round; byzantine scripts see their
messages before acting. The misbehavior set and the functionality inputs
are derived from messages only, by the same functions replay uses.
"""

from typing import Any, Collection, Literal, Mapping, NamedTuple, Optional, Sequence

import numpy as np
import structlog

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.exceptions import ProtocolConfigurationError
from tfm_lab.core.rule import MechanismRule
from tfm_lab.mpcsim.agreement import identity_agreement, ordered
from tfm_lab.mpcsim.commitment import Commitment, CommitmentRegistry, Opening, verify_opening
from tfm_lab.mpcsim.field import PrimeField
from tfm_lab.mpcsim.network import (
    FUNCTIONALITY,
    Channel,
    Message,
    SynchronousNetwork,
    filter_messages,
    miner_id,
    miner_index,
)
from tfm_lab.mpcsim.scripts import MinerBehavior, UserBehavior
from tfm_lab.mpcsim.shamir import (
    Share,
    additive_reconstruct,
    additive_share,
    shamir_reconstruct,
    shamir_share,
)
from tfm_lab.schemas.experiment import IdentityConfig, MpcSimConfig
from tfm_lab.schemas.transcript import MessageRecord, OutcomeRecord, TranscriptModel
from tfm_lab.utils.logging import log_duration

logger = structlog.get_logger(__name__)

Sharing = Literal["shamir", "additive"]


class ProtocolResult(NamedTuple):
    """
    Result of one simulated run.

    Attributes:
        transcript: Full trace
        outcome: Outcome, None on abort
        miner_outputs: Output of each honest miner
    """

    transcript: TranscriptModel
    outcome: Optional[OutcomeRecord]
    miner_outputs: dict[str, Optional[OutcomeRecord]]


# =============================================================================
# Ideal functionality
# =============================================================================


def realize(
    rule: MechanismRule, identities: Sequence[str], amounts: Sequence[float], seed: int
) -> OutcomeRecord:
    """Apply the mechanism to the functionality inputs."""
    draw = rule.sample(list(amounts), seed)
    exact = rule.evaluate(list(amounts))
    return OutcomeRecord(
        identities=list(identities),
        bids=[float(a) for a in amounts],
        confirmed=[identities[i] for i in draw.confirmed],
        payments=list(draw.payments),
        miner_revenue=draw.miner_revenue,
        x=list(exact.x),
        p=list(exact.p),
        mu=exact.mu,
    )


def ideal_outcome(
    bids: Mapping[str, float],
    misbehaving: Collection[str],
    rule: MechanismRule,
    seed: int,
    field: Optional[PrimeField] = None,
) -> OutcomeRecord:
    """
    F_MPC: one bid per identity, misbehaving identities at 0.

    Bids are quantized exactly as the protocol encodes them.
    """
    field = field or PrimeField()
    identities = list(bids)
    amounts = [0.0 if i in misbehaving else field.quantize(bids[i]) for i in identities]
    return realize(rule, identities, amounts, seed)


def diff_outcomes(actual: Optional[OutcomeRecord], ideal: Optional[OutcomeRecord]) -> dict[str, Any]:
    """Fields where the protocol's outcome differs from the ideal one."""
    if actual is None or ideal is None:
        if actual is None and ideal is None:
            return {}
        return {
            "outcome": {
                "actual": None if actual is None else actual.model_dump(),
                "ideal": None if ideal is None else ideal.model_dump(),
            }
        }
    a, b = actual.model_dump(), ideal.model_dump()
    return {key: {"actual": a[key], "ideal": b[key]} for key in a if a[key] != b[key]}


# =============================================================================
# Derivations from messages
# =============================================================================


def derive_agreed(messages: Sequence[Message], identities: Sequence[str], m: int) -> list[str]:
    """Identities in a majority of the broadcast candidate sets."""
    reports = [msg.payload["identities"] for msg in filter_messages(messages, Channel.BROADCAST, "candidates")]
    return ordered(identities, identity_agreement(reports, m))


def broadcast_commitments(messages: Sequence[Message]) -> dict[str, list[str]]:
    """First commitment vector broadcast by each identity."""
    commitments: dict[str, list[str]] = {}
    for msg in filter_messages(messages, Channel.BROADCAST, "commit"):
        commitments.setdefault(msg.sender, list(msg.payload["digests"]))
    return commitments


def _opening(payload: Mapping[str, Any]) -> Opening:
    return Opening(int(payload["value"]), int(payload["randomness"]))


def _matches(digests: Optional[list[str]], index: Optional[int], opening: Opening) -> bool:
    if digests is None or index is None or not 1 <= index <= len(digests):
        return False
    return verify_opening(Commitment(digests[index - 1]), opening)


def derive_misbehaving(messages: Sequence[Message], agreed: Sequence[str], m: int) -> list[str]:
    """
    Misbehavior set, from broadcast messages only.

    An agreed identity is caught when it broadcast no commitment vector of
    length m, no valid attestation, or left a complaint without a public
    opening that matches its commitment.
    """
    commitments = broadcast_commitments(messages)
    attested: dict[str, bool] = {}
    for msg in filter_messages(messages, Channel.BROADCAST, "attest"):
        attested.setdefault(msg.sender, bool(msg.payload.get("valid")))
    responses: dict[tuple[str, int], Opening] = {}
    for msg in filter_messages(messages, Channel.BROADCAST, "response"):
        responses.setdefault((msg.sender, int(msg.payload["miner"])), _opening(msg.payload))

    caught = {
        i
        for i in agreed
        if len(commitments.get(i, [])) != m or not attested.get(i, False)
    }
    for msg in filter_messages(messages, Channel.BROADCAST, "complain"):
        identity, j = msg.payload["identity"], miner_index(msg.sender)
        if identity in caught or identity not in agreed or j is None:
            continue
        response = responses.get((identity, j))
        if response is None or not _matches(commitments.get(identity), j, response):
            caught.add(identity)
    return [i for i in agreed if i in caught]


def functionality_inputs(
    messages: Sequence[Message],
    agreed: Sequence[str],
    misbehaving: Collection[str],
    m: int,
    threshold: int,
    sharing: Sharing,
    field: PrimeField,
) -> Optional[list[float]]:
    """
    Bids F_TFM reconstructs from the miners' inputs.

    Openings that do not match the broadcast commitment are dropped. A
    failed Shamir reconstruction counts as bid 0; a missing additive share
    aborts (None).
    """
    commitments = broadcast_commitments(messages)
    received: dict[str, dict[int, int]] = {}
    for msg in filter_messages(messages, Channel.P2P, "tfm-input"):
        identity, j = msg.payload["identity"], miner_index(msg.sender)
        if msg.recipient != FUNCTIONALITY or identity not in agreed or identity in misbehaving:
            continue
        opening = _opening(msg.payload)
        if _matches(commitments.get(identity), j, opening):
            received.setdefault(identity, {}).setdefault(j, opening.value)  # type: ignore[arg-type]

    bids: list[float] = []
    for identity in agreed:
        if identity in misbehaving:
            bids.append(0.0)
            continue
        shares = [Share(j, v) for j, v in received.get(identity, {}).items()]
        if sharing == "shamir":
            secret = shamir_reconstruct(shares, threshold, field)
            bids.append(0.0 if secret is None else field.decode(secret))
        else:
            secret = additive_reconstruct(shares, m, field)
            if secret is None:
                return None
            bids.append(field.decode(secret))
    return bids


def message_records(messages: Sequence[Message]) -> list[MessageRecord]:
    return [
        MessageRecord(
            round=msg.round,
            sender=msg.sender,
            channel=msg.channel.value,
            recipient=msg.recipient,
            kind=msg.kind,
            payload=msg.payload,
        )
        for msg in messages
    ]


# =============================================================================
# Real protocol
# =============================================================================


class PiMpcSimulation:
    """
    One run of the sharing protocol followed by F_TFM.

    Attributes:
        config: Parties, scripts and seed
        rule: Mechanism F_TFM applies
        sharing: ``shamir`` (t = ceil(m/2)) or ``additive`` (m-of-m)
        network: Message log
    """

    def __init__(
        self,
        config: MpcSimConfig,
        rule: MechanismRule,
        *,
        sharing: Sharing = "shamir",
        settings: Optional[Settings] = None,
    ):
        self.config = config
        self.rule = rule
        self.sharing = sharing
        self.settings = settings or get_settings()
        self.field = PrimeField.from_settings(self.settings)
        self.seed = config.seed or 0
        self.m = config.m
        self.threshold = config.threshold if sharing == "shamir" else config.m
        self.network = SynchronousNetwork()
        self.registry = CommitmentRegistry()
        self.rng = np.random.default_rng([self.seed, 1])

        indices = range(1, self.m + 1)
        self.honest_miners = [j for j in indices if config.miner_behavior(j) is MinerBehavior.HONEST]
        self.miner_order = self.honest_miners + [j for j in indices if j not in self.honest_miners]
        # Faulty identities aim at the lowest-index honest miner.
        self.target = self.honest_miners[0] if self.honest_miners else 1
        self.identity_order: list[IdentityConfig] = sorted(
            config.identities, key=lambda i: i.behavior is not UserBehavior.HONEST
        )

        self._openings: dict[str, list[Opening]] = {}
        self._views: dict[int, dict[str, Opening]] = {j: {} for j in indices}

    def run(self) -> ProtocolResult:
        """Execute every round and the functionality."""
        with log_duration(
            "pi_mpc", logger, sharing=self.sharing, m=self.m, identities=len(self.config.identities)
        ) as extra:
            self._announce()
            self._publish_candidates()
            agreed = derive_agreed(self.network.messages, self._identity_ids, self.m)
            self._commit(agreed)
            self._attest()
            self._distribute_openings()
            self._vote(agreed)
            self._respond()
            misbehaving = derive_misbehaving(self.network.messages, agreed, self.m)
            self._send_inputs(agreed, misbehaving)

            bids = functionality_inputs(
                self.network.messages,
                agreed,
                misbehaving,
                self.m,
                self.threshold,
                self.sharing,
                self.field,
            )
            outcome = None if bids is None else realize(self.rule, agreed, bids, self.seed)
            extra.update(misbehaving=len(misbehaving), aborted=outcome is None)

        if outcome is None:
            logger.warning("pi_mpc_aborted", m=self.m, sharing=self.sharing)
        miner_outputs = {miner_id(j): self._miner_output(j) for j in self.honest_miners}
        transcript = TranscriptModel(
            mode="guaranteed" if self.sharing == "shamir" else "abort",
            m=self.m,
            threshold=self.threshold,
            mechanism=self.rule.params.model_dump(mode="json", by_alias=True),
            identities=self._identity_ids,
            run_seed=self.seed,
            seed=self.seed,
            field_prime=self.field.modulus,
            fixed_point_scale=self.field.scale,
            messages=message_records(self.network.messages),
            notes=list(self.network.notes),
            agreed=agreed,
            misbehaving=misbehaving,
            aborted=outcome is None,
            outcome=outcome,
        )
        return ProtocolResult(transcript, outcome, miner_outputs)

    @property
    def _identity_ids(self) -> list[str]:
        return [i.identity for i in self.config.identities]

    # -------------------------------------------------------------------------
    # Rounds
    # -------------------------------------------------------------------------

    def _announce(self) -> None:
        self.network.next_round()
        for identity in self.identity_order:
            for j in self.miner_order:
                self.network.send(identity.identity, miner_id(j), "announce", {})

    def _publish_candidates(self) -> None:
        self.network.next_round()
        for j in self.miner_order:
            seen = [msg.sender for msg in self.network.inbox(miner_id(j), "announce")]
            if self.config.miner_behavior(j) is MinerBehavior.SUPPRESS_IDENTITIES:
                seen = []
            self.network.broadcast(miner_id(j), "candidates", {"identities": ordered(self._identity_ids, seen)})

    def _share(self, secret: int) -> list[Share]:
        if self.sharing == "shamir":
            return shamir_share(secret, self.threshold, self.m, self.rng, self.field)
        return additive_share(secret, self.m, self.rng, self.field)

    def _commit_vector(self, secret: int) -> tuple[list[str], list[Opening]]:
        digests, openings = [], []
        for share in self._share(secret):
            commitment, opening = self.registry.commit(share.value, self.rng)
            digests.append(commitment.digest)
            openings.append(opening)
        return digests, openings

    def _commit(self, agreed: Sequence[str]) -> None:
        self.network.next_round()
        for identity in self.identity_order:
            if identity.identity not in agreed or identity.behavior is UserBehavior.WITHHOLD_COMMITMENT:
                continue
            secret = self.field.encode(identity.bid)
            digests, openings = self._commit_vector(secret)
            self._openings[identity.identity] = openings
            self.network.broadcast(identity.identity, "commit", {"digests": digests})
            if identity.behavior is UserBehavior.EQUIVOCATE:
                other, _ = self._commit_vector(self.field.add(secret, 1))
                self.network.broadcast(identity.identity, "commit", {"digests": other})

    def _attest(self) -> None:
        """Abstract consistency attestation in place of a zero-knowledge proof."""
        self.network.next_round()
        for identity in self.identity_order:
            if identity.identity in self._openings:
                valid = identity.behavior is not UserBehavior.INVALID_ATTESTATION
                self.network.broadcast(identity.identity, "attest", {"valid": valid})

    def _distribute_openings(self) -> None:
        self.network.next_round()
        for identity in self.identity_order:
            openings = self._openings.get(identity.identity)
            if openings is None:
                continue
            for j in self.miner_order:
                opening = openings[j - 1]
                if j == self.target:
                    if identity.behavior.withholds_share:
                        continue
                    if identity.behavior is UserBehavior.BAD_OPENING:
                        opening = Opening(self.field.add(opening.value, 1), opening.randomness)
                self.network.send(
                    identity.identity,
                    miner_id(j),
                    "opening",
                    {"value": opening.value, "randomness": opening.randomness},
                )

    def _vote(self, agreed: Sequence[str]) -> None:
        self.network.next_round()
        commitments = broadcast_commitments(self.network.messages)
        for j in self.miner_order:
            behavior = self.config.miner_behavior(j)
            received = {msg.sender: _opening(msg.payload) for msg in self.network.inbox(miner_id(j), "opening")}
            for identity in agreed:
                if identity not in commitments:
                    continue
                opening = received.get(identity)
                valid = opening is not None and _matches(commitments[identity], j, opening)
                if valid:
                    self._views[j][identity] = opening  # type: ignore[assignment]
                if not behavior.sends_votes:
                    continue
                kind = "ok" if valid and behavior is not MinerBehavior.FALSE_COMPLAINT else "complain"
                self.network.broadcast(miner_id(j), kind, {"identity": identity}, key=identity)

    def _respond(self) -> None:
        self.network.next_round()
        complaints = [
            (msg.payload["identity"], miner_index(msg.sender))
            for msg in self.network.broadcasts("complain")
        ]
        for identity in self.identity_order:
            if not identity.behavior.answers_complaints:
                continue
            for accused, j in complaints:
                if accused != identity.identity or j is None:
                    continue
                opening = self._openings[accused][j - 1]
                self.network.broadcast(
                    accused,
                    "response",
                    {"miner": j, "value": opening.value, "randomness": opening.randomness},
                    key=str(j),
                )

    def _send_inputs(self, agreed: Sequence[str], misbehaving: Collection[str]) -> None:
        self.network.next_round()
        commitments = broadcast_commitments(self.network.messages)
        public = {
            (msg.sender, int(msg.payload["miner"])): _opening(msg.payload)
            for msg in self.network.broadcasts("response")
        }
        for j in self.miner_order:
            behavior = self.config.miner_behavior(j)
            if not behavior.opens:
                continue
            for identity in agreed:
                if identity in misbehaving:
                    continue
                opening = self._views[j].get(identity)
                if opening is None:
                    candidate = public.get((identity, j))
                    if candidate is None or not _matches(commitments.get(identity), j, candidate):
                        continue
                    opening = candidate
                if behavior is MinerBehavior.CORRUPT_INPUT:
                    opening = Opening(self.field.add(opening.value, 1), opening.randomness)
                self.network.send(
                    miner_id(j),
                    FUNCTIONALITY,
                    "tfm-input",
                    {"identity": identity, "value": opening.value, "randomness": opening.randomness},
                )

    def _miner_output(self, j: int) -> Optional[OutcomeRecord]:
        """What honest miner j computes from its own view of the broadcast channel."""
        view = [
            msg
            for msg in self.network.messages
            if msg.channel == Channel.BROADCAST or msg.recipient in (miner_id(j), FUNCTIONALITY)
        ]
        agreed = derive_agreed(view, self._identity_ids, self.m)
        misbehaving = derive_misbehaving(view, agreed, self.m)
        bids = functionality_inputs(
            view, agreed, misbehaving, self.m, self.threshold, self.sharing, self.field
        )
        return None if bids is None else realize(self.rule, agreed, bids, self.seed)


def check_guaranteed_output(config: MpcSimConfig) -> None:
    """
    Raises:
        ProtocolConfigurationError: If corrupt miners are not a strict minority
    """
    if 2 * config.corrupt_count >= config.m:
        raise ProtocolConfigurationError(
            f"{config.corrupt_count} of {config.m} miners corrupt: guaranteed output needs "
            "fewer than m/2; use abort mode",
            m=config.m,
            corrupt_miners=config.corrupt_count,
        )


def run_pi_mpc(
    config: MpcSimConfig, rule: MechanismRule, settings: Optional[Settings] = None
) -> ProtocolResult:
    """
    Guaranteed-output protocol with Shamir sharing, t = ceil(m/2).

    Raises:
        ProtocolConfigurationError: If corrupt miners are m/2 or more

    Example:
        ```python
        config = MpcSimConfig(m=4, identities=[{"id": "alice", "bid": 7.0}])
        result = run_pi_mpc(config, rule)
        result.outcome.confirmed
        ```
    """
    check_guaranteed_output(config)
    return PiMpcSimulation(config, rule, sharing="shamir", settings=settings).run()


def expected_misbehaving(config: MpcSimConfig) -> list[str]:
    """Identities whose script lands them in the misbehavior set."""
    return [i.identity for i in config.identities if i.behavior.lands_in_misbehaving]


__all__ = [
    "ProtocolResult",
    "PiMpcSimulation",
    "realize",
    "ideal_outcome",
    "diff_outcomes",
    "derive_agreed",
    "derive_misbehaving",
    "broadcast_commitments",
    "functionality_inputs",
    "message_records",
    "check_guaranteed_output",
    "run_pi_mpc",
    "expected_misbehaving",
]
