import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feedfilter.corpus import Category, load_survey
from feedfilter.synthpop import (
    GenConfig,
    SynthMessage,
    SynthUserProfile,
    default_profile,
    generate,
    write_dataset,
)


class TestGenConfig:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            GenConfig(category_weights=(0.5,) * 8)

    def test_counts_positive(self):
        with pytest.raises(ValueError):
            GenConfig(n_users=0)

    def test_infeasible_items_per_user(self):
        config = GenConfig(n_users=2, n_messages=10, items_per_user=20)
        with pytest.raises(ValueError, match="items_per_user"):
            generate(config)


class TestProfiles:
    def test_threshold_range_validated(self):
        with pytest.raises(ValueError):
            SynthUserProfile("u", {Category.THREAT: 7.0}, sigma=0.1, epsilon=0.0)

    def test_zero_thresholds_filter_everything(self):
        config = GenConfig(n_users=1, n_messages=80, items_per_user=75, seed=1)
        profile = SynthUserProfile(
            "u0000", {c: 0.0 for c in Category}, sigma=0.3, epsilon=0.0
        )
        survey = generate(config, profiles=[profile]).survey
        assert all(r.filter for r in survey.responses)

    def test_max_thresholds_filter_nothing(self):
        config = GenConfig(n_users=1, n_messages=80, items_per_user=75, seed=1)
        profile = SynthUserProfile(
            "u0000", {c: 6.0 for c in Category}, sigma=0.3, epsilon=0.0
        )
        survey = generate(config, profiles=[profile]).survey
        assert not any(r.filter for r in survey.responses)


class TestGenerate:
    def test_same_seed_bit_identical(self):
        config = GenConfig(n_users=6, n_messages=90, seed=11)
        assert generate(config) == generate(config)

    def test_different_seed_differs(self):
        a = generate(GenConfig(n_users=6, n_messages=90, seed=11)).survey
        b = generate(GenConfig(n_users=6, n_messages=90, seed=12)).survey
        assert a != b

    def test_noiseless_threshold_semantics(self):
        config = GenConfig(n_users=1, n_messages=100, items_per_user=75, seed=5)
        profile = SynthUserProfile(
            "u0000", {c: 3.0 for c in Category}, sigma=0.0, epsilon=0.0
        )
        result = generate(config, profiles=[profile])
        mu_by_id = {m.id: m.mu for m in result.synth_messages}
        for r in result.survey.responses:
            # Noiseless perception rounds the latent level half-up.
            perceived = min(5, max(1, int(mu_by_id[r.message_id] + 0.5)))
            assert r.intensity == perceived
            assert r.filter == (perceived >= 3.0)

    def test_exact_rater_coverage(self):
        config = GenConfig(n_users=60, n_messages=900, seed=2)
        survey = generate(config).survey
        counts = {m: 0 for m in (msg.id for msg in survey.messages)}
        for r in survey.responses:
            counts[r.message_id] += 1
        assert set(counts.values()) == {5}
        per_user = {}
        for r in survey.responses:
            per_user[r.user_id] = per_user.get(r.user_id, 0) + 1
        assert set(per_user.values()) == {75}

    def test_non_harassment_latent_level_is_one(self):
        result = generate(GenConfig(n_users=4, n_messages=60, items_per_user=60, seed=9))
        for m in result.synth_messages:
            if m.category is Category.NON_HARASSMENT:
                assert m.mu == 1.0

    def test_user_never_rates_message_twice(self):
        survey = generate(GenConfig(n_users=7, n_messages=80, items_per_user=60, seed=3)).survey
        pairs = [(r.user_id, r.message_id) for r in survey.responses]
        assert len(pairs) == len(set(pairs))

    def test_population_includes_decided_users(self):
        result = generate(GenConfig(n_users=60, n_messages=900, seed=7))
        kinds = {"all": 0, "none": 0}
        for p in result.profiles:
            values = set(p.thresholds.values())
            if values == {0.0}:
                kinds["all"] += 1
            elif values == {6.0}:
                kinds["none"] += 1
        assert kinds["all"] > 0 and kinds["none"] > 0


class TestObservations:
    @pytest.mark.parametrize("seed", [1, 7, 23])
    def test_filter_rate_monotone_in_intensity(self, seed):
        survey = generate(GenConfig(n_users=20, n_messages=300, seed=seed)).survey
        buckets = {}
        for r in survey.responses:
            total, yes = buckets.get(r.intensity, (0, 0))
            buckets[r.intensity] = (total + 1, yes + int(r.filter))
        rates = [yes / total for _, (total, yes) in sorted(buckets.items())]
        assert all(a <= b for a, b in zip(rates, rates[1:]))

    # Expected bucket rates are epsilon + (1 - 2*epsilon) * P(threshold <= i),
    # monotone whenever epsilon < 1/2.  Finite surveys need the per-step gap
    # to dominate sampling noise, so the check runs at population scale with
    # a capped flip rate and skips starved buckets.
    @given(st.integers(min_value=0, max_value=100_000), st.floats(min_value=0.0, max_value=0.10))
    @settings(max_examples=8, deadline=None)
    def test_monotonicity_across_seeds_and_flip_noise(self, seed, epsilon):
        survey = generate(
            GenConfig(n_users=40, n_messages=600, seed=seed, epsilon=epsilon)
        ).survey
        buckets = {}
        for r in survey.responses:
            total, yes = buckets.get(r.intensity, (0, 0))
            buckets[r.intensity] = (total + 1, yes + int(r.filter))
        rates = [
            yes / total for _, (total, yes) in sorted(buckets.items()) if total >= 100
        ]
        assert all(a <= b for a, b in zip(rates, rates[1:]))

    def test_category_rate_spread(self, default_population):
        from feedfilter.corpus import filter_rate_by_category

        rates = filter_rate_by_category(default_population.survey)
        assert max(rates.values()) - min(rates.values()) > 0.1


class TestWriteDataset:
    def test_round_trips_through_ingestion(self, tmp_path):
        result = generate(GenConfig(n_users=4, n_messages=60, items_per_user=45, seed=13))
        write_dataset(result, tmp_path)
        survey, skipped = load_survey(tmp_path)
        assert skipped == 0
        assert survey.messages == result.survey.messages
        assert survey.responses == result.survey.responses
        sidecar = json.loads((tmp_path / "profiles.json").read_text())
        assert len(sidecar["profiles"]) == 4
        assert sidecar["config"]["seed"] == 13
