#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "parframe/reconstruction.hpp"
#include "test_util.hpp"

using namespace parframe;
using namespace parframe::recon;
using testutil::canonical_frame;
using testutil::max_abs;

namespace {

bundle::SamplePtr sphere_sample(int n) {
    return std::make_shared<const geo::ManifoldSample>(geo::fibonacci_sphere(n));
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("measure") {
    auto e = canonical_frame<Real>(2, 3);
    Eigen::VectorXd v(2);
    v << 1, 2;
    Eigen::VectorXd data = measure(e, v);
    CHECK(data.size() == 3);
    CHECK(data(0) == 1.0);
    CHECK(data(1) == 2.0);
    CHECK(data(2) == 0.0);

    // Parseval identity: measurement preserves the norm
    rng::Stream s(31);
    for (int trial = 0; trial < 20; ++trial) {
        auto b = parseval_retract(testutil::random_conditioned_frame<Real>(2, 5, s));
        Eigen::VectorXd w = testutil::random_gaussian<Real>(2, 1, s);
        CHECK(measure(b, w).squaredNorm() == doctest::Approx(w.squaredNorm()).epsilon(1e-12));
    }

    Eigen::VectorXd wrong(3);
    wrong.setZero();
    CHECK_THROWS_AS(measure(e, wrong), DimensionMismatch);

    // rank-deficient candidates are still measurable
    Eigen::MatrixXd degenerate(2, 2);
    degenerate << 1, 1, 0, 0;
    CHECK_NOTHROW(measure(RealFrame(degenerate), v));
}

TEST_CASE("reconstruct") {
    auto e = canonical_frame<Real>(2, 3);
    Eigen::VectorXd data(3);
    data << 1, 2, 5;
    Eigen::VectorXd v = reconstruct(e, data);
    CHECK(v(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v(1) == doctest::Approx(2.0).epsilon(1e-14));

    rng::Stream s(32);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::Index k = 1 + static_cast<Eigen::Index>(s.next_u64() % 3);
        Eigen::Index n = k + static_cast<Eigen::Index>(s.next_u64() % 4);
        auto a = testutil::random_conditioned_frame<Real>(k, n, s);
        Eigen::VectorXd w = testutil::random_gaussian<Real>(k, 1, s);
        CHECK((reconstruct(a, measure(a, w)) - w).cwiseAbs().maxCoeff() <= 1e-10);
    }

    // for Parseval frames the reconstruction operator is the synthesis map
    for (int trial = 0; trial < 10; ++trial) {
        auto b = parseval_retract(testutil::random_conditioned_frame<Real>(2, 4, s));
        Eigen::VectorXd d = testutil::random_gaussian<Real>(4, 1, s);
        CHECK((reconstruct(b, d) - b.entries() * d).cwiseAbs().maxCoeff() <= 1e-10);
    }

    Eigen::MatrixXd degenerate(2, 3);
    degenerate.setZero();
    Eigen::VectorXd d3(3);
    d3.setZero();
    CHECK_THROWS_AS(reconstruct(RealFrame(degenerate), d3), NotAFrame);
    Eigen::VectorXd d2(2);
    d2.setZero();
    CHECK_THROWS_AS(reconstruct(e, d2), DimensionMismatch);
}

TEST_CASE("field_mse is zero without noise and deterministic with it") {
    auto sample = sphere_sample(64);
    auto frames = bundle::random_bundle_frame(sample, 3, 1);
    auto field = bundle::random_vector_field(sample, 2);

    CHECK(field_mse(frames, field, 0.0, 99) <= 1e-18);

    double a = field_mse(frames, field, 0.01, 7);
    double b = field_mse(frames, field, 0.01, 7);
    CHECK(a == b);
    CHECK(a > 0.0);
    CHECK(a != field_mse(frames, field, 0.01, 8));

    CHECK_THROWS_AS(field_mse(frames, field, -0.1, 0), DomainError);
}

TEST_CASE("field_mse matches the analytic trace law for the Parseval frame") {
    // E |(s s^T)^{-1} s e|^2 = variance * trace((s s^T)^{-1}) = variance * k
    // for Parseval frames; averaging over many seeds is the Monte Carlo
    // oracle
    auto sample = sphere_sample(128);
    auto parseval = bundle::projection_frame(sample);
    auto field = bundle::random_vector_field(sample, 5);
    const double variance = 0.01;
    double total = 0.0;
    const int rounds = 800;  // 800 * 128 noise draws
    for (int r = 0; r < rounds; ++r)
        total += field_mse(parseval, field, variance, static_cast<std::uint64_t>(r));
    double mean = total / rounds;
    CHECK(mean == doctest::Approx(variance * 2).epsilon(0.02));
}

TEST_CASE("field_mse matches variance * sum(1/lambda) for known spectra") {
    auto sample = sphere_sample(96);
    auto frames = bundle::random_bundle_frame(sample, 3, 11);
    auto field = bundle::random_vector_field(sample, 12);
    const double variance = 0.01;

    double expected = 0.0;
    for (const auto& f : frames.frames) {
        auto spec = spectrum(f);
        for (std::size_t i = 0; i < spec.size(); ++i) expected += variance / spec[i];
    }
    expected /= frames.num_points();

    double total = 0.0;
    const int rounds = 1200;
    for (int r = 0; r < rounds; ++r)
        total += field_mse(frames, field, variance, rng::mix(55, static_cast<std::uint64_t>(r)));
    CHECK(total / rounds == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("config validation and json round trip") {
    ExperimentConfig c;
    c.num_random_frames = 3;
    c.num_fields = 2;
    c.fibonacci_n = 100;
    c.master_seed = 5;
    CHECK_NOTHROW(c.validate());

    auto back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.num_random_frames == 3);
    CHECK(back.num_fields == 2);
    CHECK(back.fibonacci_n == 100);
    CHECK(back.master_seed == 5);

    ExperimentConfig bad = c;
    bad.noise_variance = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.num_fields = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.source_kind = "mesh";
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("run_experiment shapes, determinism, and separation") {
    ExperimentConfig c;
    c.num_random_frames = 2;
    c.num_fields = 2;
    c.fibonacci_n = 100;
    c.master_seed = 17;
    c.threads = 1;

    auto report = run_experiment(c);
    CHECK(report.parseval_mses.size() == 2);
    CHECK(report.random_frame_mses.rows() == 2);
    CHECK(report.random_frame_mses.cols() == 2);
    CHECK(report.best_random_frame >= 0);
    CHECK(report.generator_id == std::string("mt19937_64/box-muller"));
    for (const auto& s : report.random_summaries) {
        CHECK(s.min <= s.mean);
        CHECK(s.mean <= s.max);
    }

    auto again = run_experiment(c);
    CHECK(report.parseval_mses == again.parseval_mses);
    CHECK((report.random_frame_mses - again.random_frame_mses).cwiseAbs().maxCoeff() == 0.0);

    auto threaded = c;
    threaded.threads = 4;
    auto parallel = run_experiment(threaded);
    CHECK(report.parseval_mses == parallel.parseval_mses);
    CHECK((report.random_frame_mses - parallel.random_frame_mses).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("per-point expected MSE is minimized by equal eigenvalues at fixed trace") {
    // for trace(s s^T) = k, variance * sum(1/lambda_i) >= variance * k with
    // equality only at lambda = (1, ..., 1); Monte Carlo estimates follow the
    // same ordering
    rng::Stream s(33);
    const double variance = 0.01;
    const int draws = 20000;
    for (int trial = 0; trial < 50; ++trial) {
        auto raw = testutil::random_conditioned_frame<Real>(2, 3, s, 1e4);
        Eigen::MatrixXd op = frame_operator(raw);
        RealFrame scaled(std::sqrt(2.0 / op.trace()) * raw.entries());  // trace now 2

        auto spec = spectrum(scaled);
        double analytic = variance * (1.0 / spec[0] + 1.0 / spec[1]);
        CHECK(analytic >= variance * 2.0 - 1e-12);

        Eigen::MatrixXd s_op = frame_operator(scaled);
        Eigen::MatrixXd recon_op = s_op.inverse() * scaled.entries();
        rng::Stream noise(rng::mix(1234, static_cast<std::uint64_t>(trial)));
        double total = 0.0;
        for (int d = 0; d < draws; ++d) {
            Eigen::Vector3d e(noise.normal(), noise.normal(), noise.normal());
            total += (recon_op * (std::sqrt(variance) * e)).squaredNorm();
        }
        double monte_carlo = total / draws;
        CHECK(monte_carlo == doctest::Approx(analytic).epsilon(0.05));
    }
}

TEST_CASE("emit_report writes the five csv files and a json summary") {
    ExperimentConfig c;
    c.num_random_frames = 2;
    c.num_fields = 2;
    c.fibonacci_n = 100;
    c.master_seed = 3;
    c.threads = 1;
    auto report = run_experiment(c);

    TempDir dir("parframe_report_test");
    emit_report(report, dir.path.string());

    for (const char* name : {"mse_parseval.csv", "mse_random.csv", "cdf_parseval.csv",
                             "cdf_best_random.csv", "histograms.csv"})
        CHECK(std::filesystem::exists(dir.path / name));

    // row counts
    auto count_lines = [](const std::string& text) {
        return std::count(text.begin(), text.end(), '\n');
    };
    CHECK(count_lines(slurp(dir.path / "mse_parseval.csv")) == 1 + 2);
    CHECK(count_lines(slurp(dir.path / "mse_random.csv")) == 1 + 4);
    CHECK(count_lines(slurp(dir.path / "histograms.csv")) == 1 + 64);

    // cdf columns are non-decreasing
    for (const char* name : {"cdf_parseval.csv", "cdf_best_random.csv"}) {
        std::istringstream in(slurp(dir.path / name));
        std::string header;
        std::getline(in, header);
        double prev_mse = -1.0, prev_cdf = -1.0, mse, cdf;
        char comma;
        while (in >> mse >> comma >> cdf) {
            CHECK(mse >= prev_mse);
            CHECK(cdf >= prev_cdf);
            prev_mse = mse;
            prev_cdf = cdf;
        }
        CHECK(prev_cdf == doctest::Approx(1.0));
    }

    // histogram mass equals the sample counts
    {
        std::istringstream in(slurp(dir.path / "histograms.csv"));
        std::string line;
        std::getline(in, line);
        long parseval_mass = 0, random_mass = 0;
        while (std::getline(in, line)) {
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double lo, hi;
            long a, b;
            row >> lo >> hi >> a >> b;
            parseval_mass += a;
            random_mass += b;
        }
        CHECK(parseval_mass == 2);
        CHECK(random_mass == 2);
    }

    auto summary = nlohmann::json::parse(slurp(dir.path / "summary.json"));
    CHECK(summary["header"]["gaussian_transform"] == "mt19937_64/box-muller");
    CHECK(summary["parseval"]["min"].get<double>() <= summary["parseval"]["mean"].get<double>());
    CHECK(summary["parseval"]["mean"].get<double>() <= summary["parseval"]["max"].get<double>());
    CHECK(summary["best_random_frame"].get<int>() >= 0);
    CHECK(summary["random_frames"].size() == 2);
}

TEST_CASE("emit_report is byte-stable across reruns") {
    ExperimentConfig c;
    c.num_random_frames = 2;
    c.num_fields = 3;
    c.fibonacci_n = 64;
    c.master_seed = 8;
    c.threads = 2;

    TempDir dir_a("parframe_stable_a");
    TempDir dir_b("parframe_stable_b");
    emit_report(run_experiment(c), dir_a.path.string());
    emit_report(run_experiment(c), dir_b.path.string());
    for (const char* name : {"mse_parseval.csv", "mse_random.csv", "cdf_parseval.csv",
                             "cdf_best_random.csv", "histograms.csv", "summary.json"})
        CHECK(slurp(dir_a.path / name) == slurp(dir_b.path / name));
}
