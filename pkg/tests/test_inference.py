import random
from math import fsum

import pytest

from ucm.errors import ContradictoryEvidenceError, GuardExceededError, UnknownNameError
from ucm.inference import Query, joint_enumerate, posterior_marginal
from ucm.model import Cpt, ModelDocument, VariableNode
from ucm.parser import parse_model

from modelgen import random_bn, random_query

TOL = 1e-9

# hand arithmetic over the corrected perception chain:
#   P(perception=car)  = 0.6*0.9  + 0.3*0.005 + 0.1*0.0 = 0.5415
#   P(perception=ped)  = 0.6*0.005 + 0.3*0.9  + 0.1*0.0 = 0.273
#   P(perception=c/p)  = 0.6*0.05 + 0.3*0.05  + 0.1*0.2 = 0.065
#   P(perception=none) = 0.6*0.045 + 0.3*0.045 + 0.1*0.8 = 0.1205
PERCEPTION_PRIOR = (0.5415, 0.273, 0.065, 0.1205)
# renormalizing the none column (0.027, 0.0135, 0.08) by 0.1205:
GT_GIVEN_NONE = (0.027 / 0.1205, 0.0135 / 0.1205, 0.08 / 0.1205)


def assert_close(actual, expected, tol=TOL):
    assert len(actual) == len(expected)
    for a, e in zip(actual, expected):
        assert abs(a - e) <= tol, (actual, expected)


def test_perception_prior_both_routes(perception_doc):
    q = Query("perception")
    assert_close(posterior_marginal(perception_doc, q).probs, PERCEPTION_PRIOR)
    assert_close(joint_enumerate(perception_doc, q).probs, PERCEPTION_PRIOR)


def test_ground_truth_posterior_given_none(perception_doc):
    q = Query("ground_truth", {"perception": "none"})
    assert_close(posterior_marginal(perception_doc, q).probs, GT_GIVEN_NONE)
    assert_close(joint_enumerate(perception_doc, q).probs, GT_GIVEN_NONE)


def test_root_marginal_is_its_prior(perception_doc):
    marginal = posterior_marginal(perception_doc, Query("ground_truth"))
    assert_close(marginal.probs, (0.6, 0.3, 0.1))


def test_identity_chain_pins_parent():
    doc = parse_model(
        'model "chain"\n'
        "variable X { states: a, b }\n"
        "variable Y { states: a, b parents: X }\n"
        "cpt X { () -> 0.5, 0.5 }\n"
        "cpt Y { (a) -> 1.0, 0.0\n (b) -> 0.0, 1.0 }\n"
    )
    for state in ("a", "b"):
        marginal = posterior_marginal(doc, Query("X", {"Y": state}))
        assert marginal.prob(state) == pytest.approx(1.0, abs=TOL)


def test_point_mass_via_deterministic_child(perception_doc):
    # evidence-monotonicity smoke check: observe the target through an
    # identity child and the target marginal collapses to a point mass
    gt = perception_doc.variable("ground_truth")
    mirror = VariableNode(name="mirror", states=gt.states, parents=("ground_truth",))
    rows = {
        (s,): tuple(1.0 if t == s else 0.0 for t in gt.states) for s in gt.states
    }
    doc = ModelDocument(
        name="mirrored",
        variables=perception_doc.variables + (mirror,),
        cpts=perception_doc.cpts + (Cpt(variable="mirror", rows=rows),),
    )
    marginal = posterior_marginal(doc, Query("ground_truth", {"mirror": "unknown"}))
    assert_close(marginal.probs, (0.0, 0.0, 1.0))


def test_contradictory_evidence():
    doc = parse_model(
        'model "m"\n'
        "variable X { states: a, b }\n"
        "variable Y { states: a, b parents: X }\n"
        "cpt X { () -> 1.0, 0.0 }\n"
        "cpt Y { (a) -> 1.0, 0.0\n (b) -> 0.0, 1.0 }\n"
    )
    with pytest.raises(ContradictoryEvidenceError):
        posterior_marginal(doc, Query("X", {"Y": "b"}))
    with pytest.raises(ContradictoryEvidenceError):
        joint_enumerate(doc, Query("X", {"Y": "b"}))


def test_unknown_names_raise(perception_doc):
    with pytest.raises(UnknownNameError):
        posterior_marginal(perception_doc, Query("ghost"))
    with pytest.raises(UnknownNameError):
        posterior_marginal(perception_doc, Query("perception", {"ground_truth": "bike"}))
    with pytest.raises(UnknownNameError):
        posterior_marginal(perception_doc, Query("perception", {"perception": "car"}))


def test_joint_guard(perception_doc, monkeypatch):
    with pytest.raises(GuardExceededError):
        joint_enumerate(perception_doc, Query("perception"), guard=4)
    monkeypatch.setenv("UCM_GUARD_STATES", "4")
    with pytest.raises(GuardExceededError):
        joint_enumerate(perception_doc, Query("perception"))
    monkeypatch.setenv("UCM_GUARD_STATES", "1000000")
    assert_close(joint_enumerate(perception_doc, Query("perception")).probs, PERCEPTION_PRIOR)


def test_elimination_matches_enumeration_on_random_models():
    rng = random.Random(99)
    for _ in range(60):
        doc = random_bn(rng)
        target, evidence = random_query(rng, doc)
        q = Query(target, evidence)
        ve = posterior_marginal(doc, q)
        oracle = joint_enumerate(doc, q)
        assert_close(ve.probs, oracle.probs)
        assert abs(fsum(ve.probs) - 1.0) <= TOL
        assert min(ve.probs) >= 0.0
