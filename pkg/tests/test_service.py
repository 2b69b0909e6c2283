import threading

import pytest
from fastapi.testclient import TestClient

from feedfilter.config import RunConfig
from feedfilter.service import create_app
from feedfilter.synthpop import GenConfig, generate


@pytest.fixture(scope="module")
def survey():
    return generate(GenConfig(n_users=6, n_messages=90, seed=3)).survey


@pytest.fixture()
def client(survey):
    app = create_app(survey, RunConfig(seed=3, learner="nb"))
    return TestClient(app)


def submit_next(client, user, intensity=3, choice=True):
    nxt = client.get(f"/api/session/{user}/next")
    assert nxt.status_code == 200
    body = nxt.json()
    resp = client.post(
        f"/api/session/{user}/response",
        json={"message_id": body["message_id"], "intensity": intensity, "filter": choice},
    )
    return body["message_id"], resp


class TestSessionFlow:
    def test_fresh_user_then_one_response(self, client):
        agent = client.get("/api/session/alice/agent").json()
        assert agent == {
            "n_responses": 0,
            "agreement_rate": None,
            "per_category_filter_rate": {},
            "warmed_up": False,
        }
        _, resp = submit_next(client, "alice")
        assert resp.status_code == 200
        assert resp.json()["accepted"] is True
        agent = client.get("/api/session/alice/agent").json()
        assert agent["n_responses"] == 1
        assert agent["warmed_up"] is False

    def test_warm_up_prediction_appears_at_item_six(self, client):
        predictions = []
        for _ in range(7):
            _, resp = submit_next(client, "bob", choice=True)
            predictions.append(resp.json()["agent_prediction_was"])
        assert predictions[:5] == [None] * 5
        assert predictions[5] is not None
        assert predictions[6] is not None

    def test_consistent_filterer_predicted_true(self, client):
        final = None
        for _ in range(20):
            _, final = submit_next(client, "carol", choice=True)
        assert final.json()["agent_prediction_was"] is True
        assert final.json()["running_agreement"] == 1.0

    def test_next_is_stable_until_answered(self, client):
        first = client.get("/api/session/dave/next").json()
        second = client.get("/api/session/dave/next").json()
        assert first == second


class TestValidation:
    def test_duplicate_rejected_state_unchanged(self, client):
        message_id, _ = submit_next(client, "erin")
        before = client.get("/api/session/erin/agent").json()
        dup = client.post(
            "/api/session/erin/response",
            json={"message_id": message_id, "intensity": 2, "filter": False},
        )
        assert dup.status_code == 409
        after = client.get("/api/session/erin/agent").json()
        assert after == before

    def test_unknown_message_404(self, client):
        resp = client.post(
            "/api/session/frank/response",
            json={"message_id": "no-such-id", "intensity": 3, "filter": True},
        )
        assert resp.status_code == 404

    def test_out_of_range_intensity_names_field(self, client):
        nxt = client.get("/api/session/gina/next").json()
        resp = client.post(
            "/api/session/gina/response",
            json={"message_id": nxt["message_id"], "intensity": 6, "filter": True},
        )
        assert resp.status_code == 422
        assert "intensity" in str(resp.json())

    def test_missing_field_names_field(self, client):
        resp = client.post(
            "/api/session/gina/response",
            json={"message_id": "m00001", "intensity": 3},
        )
        assert resp.status_code == 422
        assert "filter" in str(resp.json())


class TestIsolationAndTrace:
    def test_two_users_do_not_share_state(self, client):
        for _ in range(3):
            submit_next(client, "henry", choice=True)
        for _ in range(2):
            submit_next(client, "iris", choice=False)
        henry = client.get("/api/session/henry/agent").json()
        iris = client.get("/api/session/iris/agent").json()
        assert henry["n_responses"] == 3
        assert iris["n_responses"] == 2
        rates_h = set(henry["per_category_filter_rate"].values())
        rates_i = set(iris["per_category_filter_rate"].values())
        assert rates_h == {1.0} and rates_i == {0.0}

    def test_concurrent_sessions_disjoint_histories(self, survey):
        app = create_app(survey, RunConfig(seed=3, learner="nb"))
        client = TestClient(app)
        errors = []

        def run_user(user):
            try:
                for _ in range(10):
                    _, resp = submit_next(client, user, choice=user == "left")
                    assert resp.status_code == 200
            except Exception as exc:  # noqa: BLE001
                errors.append(exc)

        threads = [threading.Thread(target=run_user, args=(u,)) for u in ("left", "right")]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        left = client.get("/api/session/left/agent").json()
        right = client.get("/api/session/right/agent").json()
        assert left["n_responses"] == 10 and right["n_responses"] == 10
        assert set(left["per_category_filter_rate"].values()) == {1.0}
        assert set(right["per_category_filter_rate"].values()) == {0.0}

    def test_agreement_rate_counts_only_predicted_items(self, client):
        # 5 warm-up items with no prediction, then 3 predicted ones.
        for i in range(8):
            _, resp = submit_next(client, "judy", choice=True)
        agent = client.get("/api/session/judy/agent").json()
        assert agent["agreement_rate"] == 1.0
        assert agent["warmed_up"] is True


class TestReportsEndpoint:
    def test_summary_matches_analyze_schema(self, client):
        doc = client.get("/api/reports/summary").json()
        for key in ("category_frequencies", "anova", "tukey", "wilcoxon", "proportion_cis"):
            assert key in doc

    def test_static_index_served(self, client):
        resp = client.get("/")
        assert resp.status_code == 200
        assert "feedfilter" in resp.text
