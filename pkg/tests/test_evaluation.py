import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embedmatch import (
    BenchmarkProblem,
    ContractViolation,
    EvalReport,
    MatchConfig,
    SamplingConfig,
    ValidationError,
    benchmark_run,
    evaluate,
    macro_average,
)
from embedmatch.run import build_provider
from conftest import FIXTURES
from oracles import oracle_prf

PAIRS = st.sets(st.tuples(st.integers(0, 8), st.integers(0, 8)), max_size=12)


class TestEvaluate:
    def test_perfect(self):
        report = evaluate({("a", "x")}, {("a", "x")}, target_count=1)
        assert (report.precision, report.recall, report.f1) == (1.0, 1.0, 1.0)
        assert report.avg_candidates_per_target == 1.0

    def test_half_half(self):
        report = evaluate({("a", "x"), ("b", "y")}, {("a", "x"), ("c", "z")}, target_count=2)
        assert report.precision == 0.5
        assert report.recall == 0.5
        assert report.f1 == 0.5
        assert report.true_positive_count == 1

    def test_empty_proposed(self):
        report = evaluate(set(), {("a", "x")}, target_count=3)
        assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)
        assert report.avg_candidates_per_target == 0.0

    def test_empty_gold(self):
        report = evaluate({("a", "x")}, set(), target_count=1)
        assert report.recall == 0.0 and report.f1 == 0.0

    def test_counts_consistent(self):
        report = evaluate({1, 2, 3}, {2, 3, 4, 5}, target_count=2)
        assert report.proposed_count == 3
        assert report.gold_count == 4
        assert report.true_positive_count == 2
        assert report.avg_candidates_per_target == 1.5

    @given(PAIRS, PAIRS)
    @settings(max_examples=200)
    def test_matches_set_arithmetic_oracle(self, proposed, gold):
        report = evaluate(proposed, gold, target_count=max(1, len(gold)))
        p, r, f1 = oracle_prf(proposed, gold)
        assert report.precision == p
        assert report.recall == r
        assert report.f1 == f1

    @given(PAIRS, PAIRS)
    @settings(max_examples=100)
    def test_true_positive_never_hurts(self, proposed, gold):
        if not gold:
            return
        missing = gold - proposed
        if not missing:
            return
        before = evaluate(proposed, gold, 1)
        after = evaluate(proposed | {next(iter(missing))}, gold, 1)
        assert after.precision >= before.precision
        assert after.recall >= before.recall
        assert after.f1 >= before.f1

    @given(PAIRS, PAIRS)
    @settings(max_examples=100)
    def test_false_positive_never_helps_precision(self, proposed, gold):
        fp = ("fp", "fp")
        if fp in gold:
            return
        before = evaluate(proposed, gold, 1)
        after = evaluate(proposed | {fp}, gold, 1)
        assert after.precision <= before.precision


class TestMacroAverage:
    def report(self, p, r, f1, avg=0.0):
        return EvalReport(
            precision=p, recall=r, f1=f1,
            proposed_count=1, gold_count=1, true_positive_count=1,
            avg_candidates_per_target=avg,
        )

    def test_two_reports(self):
        macro = macro_average([self.report(1.0, 0.2, 0.4), self.report(0.0, 0.4, 0.6)])
        assert macro.f1 == pytest.approx(0.5)
        assert macro.precision == pytest.approx(0.5)
        assert macro.recall == pytest.approx(0.3, abs=1e-12)

    def test_single_report_identity(self):
        report = self.report(0.7, 0.6, 0.65, avg=2.0)
        assert macro_average([report]) == report

    def test_empty_rejected(self):
        with pytest.raises(ContractViolation):
            macro_average([])

    def test_f1_averaged_not_recomputed(self):
        # two reports whose averaged F1 differs from the F1 of averaged P/R
        a = self.report(1.0, 0.1, 2 * 1.0 * 0.1 / 1.1)
        b = self.report(0.1, 1.0, 2 * 1.0 * 0.1 / 1.1)
        macro = macro_average([a, b])
        assert macro.f1 == pytest.approx(2 * 1.0 * 0.1 / 1.1)
        recomputed = 2 * macro.precision * macro.recall / (macro.precision + macro.recall)
        assert macro.f1 != pytest.approx(recomputed)

    def test_38_problem_suite_matches_independent_mean(self):
        # synthetic suite the size of a full benchmark run, checked against a
        # spreadsheet-style running-sum oracle
        reports = [
            self.report((i % 11) / 10, ((i * 7) % 11) / 10, ((i * 3) % 11) / 10, avg=i % 6)
            for i in range(38)
        ]
        macro = macro_average(reports)
        sums = [0.0, 0.0, 0.0, 0.0]
        for r in reports:
            sums[0] += r.precision
            sums[1] += r.recall
            sums[2] += r.f1
            sums[3] += r.avg_candidates_per_target
        assert macro.precision == pytest.approx(sums[0] / 38, abs=1e-9)
        assert macro.recall == pytest.approx(sums[1] / 38, abs=1e-9)
        assert macro.f1 == pytest.approx(sums[2] / 38, abs=1e-9)
        assert macro.avg_candidates_per_target == pytest.approx(sums[3] / 38, abs=1e-9)


class TestMicroAverage:
    def test_pooled_counts(self):
        from embedmatch import micro_average

        a = evaluate({1, 2, 3, 4}, {1, 2}, target_count=1)  # TP 2 of 4 proposed, 2 gold
        b = evaluate({5}, {5, 6, 7, 8}, target_count=1)  # TP 1 of 1 proposed, 4 gold
        micro = micro_average([a, b])
        assert micro.precision == 3 / 5
        assert micro.recall == 3 / 6
        assert micro.true_positive_count == 3
        # macro of the same reports differs, which is the point
        macro = macro_average([a, b])
        assert macro.precision != micro.precision

    def test_benchmark_option(self, tmp_path):
        outcome = benchmark_run(
            [bilingual_problem()], TestBenchmarkRun.CFG, fixture_provider_factory,
            include_micro=True,
        )
        assert "micro" in outcome
        assert 0.0 <= outcome["micro"]["attribute_level"]["f1"] <= 1.0


def bilingual_problem():
    base = FIXTURES / "bilingual"
    return BenchmarkProblem(
        problem_id="geo-en-de",
        source_schema=str(base / "geo_en.json"),
        target_schema=str(base / "geo_de.json"),
        alignment=str(base / "gold.json"),
        source_instances={
            "country": str(base / "en_country.csv"),
            "city": str(base / "en_city.csv"),
            "river": str(base / "en_river.csv"),
        },
        target_instances={
            "land": str(base / "de_land.csv"),
            "stadt": str(base / "de_stadt.csv"),
            "fluss": str(base / "de_fluss.csv"),
        },
    )


def fixture_provider_factory():
    return build_provider({"kind": "fixture", "path": str(FIXTURES / "bilingual" / "vectors.json")})


class TestBenchmarkRun:
    CFG = MatchConfig(
        t=0.3, n=8, t_a=0.85, col_ratio=0.5,
        sampling=SamplingConfig(strategy="distinct"),
        selection_mode="one_to_one", attr_threshold=0.5,
        attr_matchers=("instance_based",),
    )

    def test_results_structure_and_macro(self, tmp_path):
        results_path = tmp_path / "results.json"
        outcome = benchmark_run(
            [bilingual_problem()], self.CFG, fixture_provider_factory, results_path=results_path
        )
        doc = json.loads(results_path.read_text())
        assert doc["config_digest"] == outcome["config_digest"]
        assert len(doc["problems"]) == 1
        record = doc["problems"][0]
        assert record["problem_id"] == "geo-en-de"
        assert 0.0 <= record["attribute_level"]["f1"] <= 1.0
        assert record["duration_seconds"] > 0.0
        assert doc["macro"]["table_level"] == outcome["macro"]["table_level"]

    def test_single_problem_macro_equals_problem(self):
        outcome = benchmark_run([bilingual_problem()], self.CFG, fixture_provider_factory)
        assert outcome["macro"]["attribute_level"] == outcome["problems"][0]["attribute_level"]

    def test_byte_identical_without_durations(self, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            benchmark_run(
                [bilingual_problem()], self.CFG, fixture_provider_factory,
                results_path=path, record_durations=False,
            )
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_bad_problem_aborts_with_id(self, tmp_path):
        broken = BenchmarkProblem(
            problem_id="broken",
            source_schema=str(tmp_path / "missing.json"),
            target_schema=str(tmp_path / "missing.json"),
            alignment=str(tmp_path / "missing.json"),
        )
        with pytest.raises(ValidationError, match="broken"):
            benchmark_run([bilingual_problem(), broken], self.CFG, fixture_provider_factory)

    def test_no_problems_rejected(self):
        with pytest.raises(ContractViolation):
            benchmark_run([], self.CFG, fixture_provider_factory)

    def test_perfect_suite_scores_one(self, tmp_path):
        # self-match problem: engine output should equal gold exactly
        base = FIXTURES / "selfmatch"
        problem = BenchmarkProblem(
            problem_id="self",
            source_schema=str(base / "left.json"),
            target_schema=str(base / "right.json"),
            alignment=str(base / "gold.json"),
            source_instances={t: str(base / f"{t}.csv") for t in ("country", "city", "river")},
            target_instances={t: str(base / f"{t}.csv") for t in ("country", "city", "river")},
        )
        cfg = MatchConfig(selection_mode="one_to_one")
        outcome = benchmark_run([problem], cfg, lambda: build_provider({"kind": "hash"}))
        assert outcome["macro"]["table_level"]["f1"] == 1.0
        assert outcome["macro"]["attribute_level"]["f1"] == 1.0
