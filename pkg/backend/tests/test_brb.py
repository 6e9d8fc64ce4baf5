"""
Tests for the self-stabilizing Bracha broadcast instance.
"""

import pytest

from app.core.exceptions import InjectionError, ProtocolError
from app.core.models import ERROR, PENDING, Outcome, Protocol
from app.modules.brb.instance import BrbInstance
from app.modules.brb.models import BrbKind, BrbMessage, BrbTag, Phase


def _msg(kind: BrbKind, payload, sender: int = 0, phase: Phase = Phase.INIT) -> BrbMessage:
    return BrbMessage(kind, phase, sender, payload)


def _kinds(out) -> list:
    return [item[0] for protocol, item in out.fresh if protocol == Protocol.BRB]


@pytest.fixture
def sender_instance(params4):
    return BrbInstance(BrbTag(Phase.INIT, 0), 0, params4)


@pytest.fixture
def receiver_instance(params4):
    return BrbInstance(BrbTag(Phase.INIT, 0), 1, params4)


class TestBrbBroadcast:
    """Sender side"""

    def test_broadcast_sends_init_and_echo(self, sender_instance):
        """The sender announces INIT and echoes its own payload"""
        out = sender_instance.broadcast("x")
        assert _kinds(out) == ["INIT", "ECHO"]
        assert sender_instance.my_init == "x"
        assert sender_instance.probe.events[0].kind == "brb.broadcast"

    def test_only_sender_broadcasts(self, receiver_instance):
        """Broadcasting on someone else's instance is API misuse"""
        with pytest.raises(ProtocolError):
            receiver_instance.broadcast("x")

    def test_same_payload_restates(self, sender_instance):
        """Repeating the payload only gossips it again"""
        sender_instance.broadcast("x")
        out = sender_instance.broadcast("x")
        assert out.fresh == []
        assert out.gossip == [(Protocol.BRB, ("INIT", "init", 0, "x"))]

    def test_second_payload_ignored(self, sender_instance):
        """The first payload of the epoch wins"""
        sender_instance.broadcast("x")
        out = sender_instance.broadcast("y")
        assert not out
        assert sender_instance.my_init == "x"
        assert sender_instance.probe.anomalies == 1


class TestBrbDelivery:
    """Echo, ready and delivery thresholds at n=4, t=1"""

    def test_echo_on_init(self, receiver_instance):
        """A receiver echoes the sender's INIT"""
        out = receiver_instance.on_message(0, _msg(BrbKind.INIT, "x"))
        assert _kinds(out) == ["ECHO"]

    def test_init_from_impostor_ignored(self, receiver_instance):
        """Only the sender may speak INIT on its instance"""
        out = receiver_instance.on_message(2, _msg(BrbKind.INIT, "x"))
        assert not out
        assert receiver_instance.init_view is None

    def test_full_run_delivers(self, receiver_instance):
        """Echo quorum triggers READY, 2t+1 READYs deliver"""
        inst = receiver_instance
        inst.on_message(0, _msg(BrbKind.INIT, "x"))
        for src in (0, 1):
            inst.on_message(src, _msg(BrbKind.ECHO, "x"))
        assert inst.readied is None
        out = inst.on_message(2, _msg(BrbKind.ECHO, "x"))
        assert _kinds(out) == ["READY"]
        for src in (0, 1):
            inst.on_message(src, _msg(BrbKind.READY, "x"))
        assert inst.deliver() is PENDING
        inst.on_message(2, _msg(BrbKind.READY, "x"))
        assert inst.deliver() == Outcome.decided("x")
        assert [e.kind for e in inst.probe.events] == ["brb.deliver"]

    def test_ready_amplification(self, receiver_instance):
        """t+1 matching READYs make a silent node READY too"""
        inst = receiver_instance
        inst.on_message(2, _msg(BrbKind.READY, "x"))
        out = inst.on_message(3, _msg(BrbKind.READY, "x"))
        assert _kinds(out) == ["READY"]
        assert inst.readied == "x"

    def test_duplicate_vote_no_effect(self, receiver_instance):
        """Receiving the same vote twice changes nothing"""
        inst = receiver_instance
        inst.on_message(2, _msg(BrbKind.ECHO, "x"))
        assert not inst.on_message(2, _msg(BrbKind.ECHO, "x"))
        assert inst.probe.anomalies == 0

    def test_foreign_tag_ignored(self, receiver_instance):
        """Messages for another instance are not counted"""
        out = receiver_instance.on_message(0, _msg(BrbKind.ECHO, "x", phase=Phase.VALID))
        assert not out
        assert receiver_instance.echoes == {}


class TestBrbInconsistency:
    """The inconsistency latch that turns conflicting evidence into ⊠"""

    def test_two_supported_payloads(self, receiver_instance):
        """t+1 READYs for two payloads latch the instance"""
        inst = receiver_instance
        for src, payload in ((0, "a"), (2, "a"), (3, "b")):
            inst.on_message(src, _msg(BrbKind.READY, payload))
        assert inst.deliver() is PENDING
        inst.on_message(1, _msg(BrbKind.READY, "b"))
        assert inst.inconsistent
        assert inst.deliver() is ERROR

    def test_no_supported_payload(self, receiver_instance):
        """n−t READYs that all disagree latch the instance"""
        inst = receiver_instance
        for src, payload in ((0, "a"), (2, "b"), (3, "c")):
            inst.on_message(src, _msg(BrbKind.READY, payload))
        assert inst.deliver() is ERROR
        assert any(e.kind == "brb.inconsistent" for e in inst.probe.events)


class TestBrbRecovery:
    """Gossip and corrupted-state repair"""

    def test_resend_restates_contributions(self, sender_instance):
        """Resend repeats INIT and ECHO as gossip"""
        sender_instance.broadcast("x")
        kinds = [item[0] for _, item in sender_instance.resend().gossip]
        assert kinds == ["INIT", "ECHO"]

    def test_sender_repairs_injected_echo(self, sender_instance):
        """A sender whose echo disagrees with its own INIT re-echoes"""
        sender_instance.broadcast("x")
        sender_instance.inject("echoed", "y")
        out = sender_instance.on_message(2, _msg(BrbKind.ECHO, "x"))
        assert ("ECHO", "init", 0, "x") in [item for _, item in out.fresh]
        assert sender_instance.echoed == "x"

    def test_unsupported_delivery_is_dropped(self, params7):
        """A corrupted delivery that n−t READY voters do not back gives way to the real payload"""
        inst = BrbInstance(BrbTag(Phase.INIT, 2), 1, params7)
        inst.inject("delivered", [2, "b"])
        inst.inject("readied", [2, "b"])
        inst.inject("readies", {"0": "junk", "1": [2, "b"], "2": [2, "b"], "3": [2, "a"], "4": [2, "a"], "5": [2, "a"]})
        good = (2, "a")

        out = inst.on_message(6, _msg(BrbKind.READY, good, sender=2))
        assert inst.deliver() is PENDING
        assert inst.readied == good
        assert ("READY", "init", 2, good) in [item for _, item in out.fresh]
        assert inst.probe.anomalies >= 1

        inst.on_message(1, _msg(BrbKind.READY, good, sender=2))
        assert inst.deliver() == Outcome.decided(good)

    def test_supported_delivery_is_kept(self, params7):
        """t+1 READY votes among n−t voters keep a delivery"""
        inst = BrbInstance(BrbTag(Phase.INIT, 2), 1, params7)
        inst.inject("delivered", [2, "b"])
        inst.inject("readies", {"0": [2, "b"], "1": [2, "b"], "3": [2, "a"], "4": [2, "a"]})
        inst.on_message(2, _msg(BrbKind.READY, (2, "b"), sender=2))
        assert inst.deliver() == Outcome.decided((2, "b"))

    def test_inject_fields(self, receiver_instance):
        """Representable values are accepted, others raise"""
        inst = receiver_instance
        inst.inject("echoes.2", [2, "a"])
        inst.inject("readies", {"0": "a", "3": None})
        inst.inject("delivered", [0, "a"])
        assert inst.echoes == {2: (2, "a")}
        assert inst.readies == {0: "a"}
        assert inst.deliver() == Outcome.decided((0, "a"))
        with pytest.raises(InjectionError):
            inst.inject("echoes.9", "a")
        with pytest.raises(InjectionError):
            inst.inject("inconsistent", "yes")
        with pytest.raises(InjectionError):
            inst.inject("bogus", 1)


if __name__ == "__main__":
    pytest.main([__file__])
