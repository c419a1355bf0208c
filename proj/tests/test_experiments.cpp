#include <doctest.h>

#include <sstream>

#include "dmslda/experiments.hpp"

using namespace dmslda;

namespace {

ExperimentSetting tiny_multiclass(int machines, int dim = 12, int b = 8) {
    ExperimentSetting s;
    s.family = Family::Multiclass;
    s.dim = dim;
    s.per_class_count = b;
    s.machines = machines;
    s.sigma_param = 0.5;
    s.test_per_class = 20;
    return s;
}

// Strip the trailing wall_ms column from every CSV line.
std::string drop_last_column(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        size_t pos = line.rfind(',');
        out << line.substr(0, pos) << '\n';
    }
    return out.str();
}

}  // namespace

TEST_CASE("ar1 covariance") {
    SUBCASE("sigma = 0 is the identity") {
        Matrix c = ar1_covariance(4, 0.0);
        CHECK((c - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("sigma = 0.5, d = 3 exact entries") {
        Matrix c = ar1_covariance(3, 0.5);
        Matrix expected(3, 3);
        expected << 1.0, 0.5, 0.25, 0.5, 1.0, 0.5, 0.25, 0.5, 1.0;
        CHECK((c - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("symmetric positive definite at sigma = 0.8") {
        Matrix c = ar1_covariance(30, 0.8);
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::LLT<Matrix> llt(c);
        CHECK(llt.info() == Eigen::Success);
    }
    SUBCASE("sigma outside [0,1) is rejected") {
        CHECK_THROWS_AS(ar1_covariance(3, 1.0), Error);
        CHECK_THROWS_AS(ar1_covariance(3, -0.1), Error);
    }
}

TEST_CASE("mean families") {
    SUBCASE("multiclass") {
        ExperimentSetting s = tiny_multiclass(1, 8);
        Matrix means = paper_means(s);
        REQUIRE(means.rows() == 3);
        REQUIRE(means.cols() == 8);
        for (int j = 0; j < 3; ++j) CHECK(means(0, j) == -2.0);
        for (int j = 3; j < 8; ++j) CHECK(means(0, j) == 0.0);
        for (int j = 0; j < 3; ++j) CHECK(means(1, j) == 0.0);
        for (int j = 3; j < 6; ++j) CHECK(means(1, j) == 2.0);
        for (int j = 6; j < 8; ++j) CHECK(means(1, j) == 0.0);
        CHECK(means.row(2).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("binary") {
        ExperimentSetting s;
        s.family = Family::Binary;
        s.num_classes = 2;
        s.dim = 15;
        Matrix means = paper_means(s);
        REQUIRE(means.rows() == 2);
        for (int j = 0; j < 10; ++j) CHECK(means(0, j) == 0.5);
        for (int j = 10; j < 15; ++j) CHECK(means(0, j) == 0.0);
        CHECK((means.row(1) + means.row(0)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("dimension floor") {
        ExperimentSetting s = tiny_multiclass(1, 5);
        CHECK_THROWS_AS(paper_means(s), DimensionTooSmall);
    }
}

TEST_CASE("shard generation") {
    ExperimentSetting s = tiny_multiclass(3);
    SUBCASE("shapes and labels") {
        GeneratedData data = generate_shards(s, 5);
        REQUIRE(data.shards.size() == 3);
        for (const auto& shard : data.shards) {
            CHECK(shard.features.rows() == 3 * 8);
            CHECK(shard.features.cols() == 12);
            CHECK(shard.labels.minCoeff() == 1);
            CHECK(shard.labels.maxCoeff() == 3);
        }
        CHECK(data.test.features.rows() == 3 * 20);
    }
    SUBCASE("same seed reproduces bitwise; different seed differs") {
        GeneratedData a = generate_shards(s, 5);
        GeneratedData b = generate_shards(s, 5);
        GeneratedData c = generate_shards(s, 6);
        CHECK((a.shards[1].features - b.shards[1].features).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.test.features - b.test.features).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.shards[1].features - c.shards[1].features).cwiseAbs().maxCoeff() > 0.0);
    }
    SUBCASE("shard content does not depend on the machine count") {
        GeneratedData few = generate_shards(tiny_multiclass(2), 7);
        GeneratedData many = generate_shards(tiny_multiclass(4), 7);
        for (int m = 0; m < 2; ++m)
            CHECK((few.shards[m].features - many.shards[m].features).cwiseAbs().maxCoeff() ==
                  0.0);
        CHECK((few.test.features - many.test.features).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("large samples recover the population moments") {
        ExperimentSetting big = tiny_multiclass(1, 6, 2000);
        GeneratedData data = generate_shards(big, 9);
        ClassSummaries summ = compute_class_summaries(data.shards[0]);
        Matrix sigma = ar1_covariance(6, 0.5);
        Matrix means = paper_means(big);
        CHECK((summ.pooled_cov - sigma).cwiseAbs().maxCoeff() < 0.1);
        CHECK((summ.class_means - means).cwiseAbs().maxCoeff() < 0.1);
    }
}

TEST_CASE("error metrics") {
    Matrix a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 1, 2, 3, 4;
    CHECK(l22_error(a, b) == 0.0);
    CHECK(l11_error(a, b) == 0.0);
    b(0, 0) = 4.0;  // diff -3
    b(1, 1) = 0.0;  // diff 4
    CHECK(l22_error(a, b) == doctest::Approx(5.0));
    CHECK(l11_error(a, b) == doctest::Approx(7.0));
    CHECK_THROWS_AS(l22_error(a, Matrix::Zero(3, 2)), ShapeMismatch);

    IntVector p(4), t(4);
    p << 1, 2, 3, 1;
    t << 1, 2, 1, 2;
    CHECK(misclassification_rate(p, t) == doctest::Approx(0.5));
    CHECK(misclassification_rate(p, p) == 0.0);
    CHECK_THROWS_AS(misclassification_rate(p, IntVector::Ones(3)), LengthMismatch);
}

TEST_CASE("single-machine trial: all non-oracle methods coincide") {
    ExperimentSetting s = tiny_multiclass(1);
    std::vector<TrialRecord> recs = run_trial(s, 3);
    REQUIRE(recs.size() == 4);
    const TrialRecord& local = recs[0];
    const TrialRecord& dm = recs[1];
    const TrialRecord& central = recs[2];
    CHECK(dm.round == 0);
    CHECK(dm.payload_bytes == 0);
    CHECK(dm.l22 == local.l22);  // identical chosen discriminant
    CHECK(dm.l11 == local.l11);
    CHECK(dm.lambda == local.lambda);
    CHECK(central.l22 == doctest::Approx(local.l22).epsilon(1e-12));
    CHECK(central.l11 == doctest::Approx(local.l11).epsilon(1e-12));
    CHECK(central.mcr == local.mcr);
}

TEST_CASE("trial records are internally consistent") {
    ExperimentSetting s = tiny_multiclass(3);
    std::vector<TrialRecord> recs = run_trial(s, 11);
    REQUIRE(recs.size() == 4);
    const TrialRecord& oracle = recs[3];
    CHECK(oracle.l22 == 0.0);  // the oracle is the population target
    CHECK(oracle.l11 == 0.0);
    CHECK(oracle.lambda == 0.0);
    const TrialRecord& dm = recs[1];
    CHECK(dm.payload_bytes > 0);
    CHECK(dm.round >= 0);
    CHECK(dm.round <= s.rounds);
    CHECK(dm.validation_chosen <= dm.validation_round0);
    for (const auto& rec : recs) {
        CHECK(rec.mcr >= 0.0);
        CHECK(rec.mcr <= 1.0);
        CHECK(std::isfinite(rec.l22));
    }
}

TEST_CASE("sweep CSV is reproducible up to timing") {
    ExperimentSetting s = tiny_multiclass(2, 10, 6);
    s.repetitions = 2;
    s.seed = 21;
    s.test_per_class = 10;
    std::string a = run_sweep({s});
    std::string b = run_sweep({s});
    CHECK(drop_last_column(a) == drop_last_column(b));

    // header plus per-rep rows plus mean/std per method
    std::istringstream in(a);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 1 + 2 * 4 + 2 * 4);
    CHECK(a.rfind("seed,sigma,b,M,K,d,method,round,lambda,l22_error,l11_error,mcr,"
                  "payload_bytes,wall_ms\n",
                  0) == 0);
}

TEST_CASE("sweep settings enumerate the study grid") {
    auto desk = sweep_settings(Family::Multiclass, false, 1);
    CHECK(desk.size() == 9);
    for (const auto& s : desk) {
        CHECK(s.repetitions == 10);
        CHECK(s.num_classes == 3);
        CHECK(s.dim == 400);
    }
    auto paper = sweep_settings(Family::Multiclass, true, 1);
    CHECK(paper.size() == 15);
    CHECK(paper[0].repetitions == 40);

    auto binary = sweep_settings(Family::Binary, false, 1);
    CHECK(binary.size() == 2);
    for (const auto& s : binary) {
        CHECK(s.num_classes == 2);
        CHECK(s.dim == 200);
        CHECK(s.per_class_count == 200);
        CHECK(s.sigma_param == 0.8);
        CHECK(s.methods.size() == 2);
    }
}
