#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <numeric>

#include "parframe/spectral_cover.hpp"
#include "test_util.hpp"

using namespace parframe;
using namespace parframe::cover;
using testutil::max_abs;

namespace {

RealFrame operator_frame(std::initializer_list<std::initializer_list<double>> rows) {
    // builds a k = n frame whose operator is the square of the given matrix
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return RealFrame(m);
}

/// Independent component-count oracle: union-find over the lift edges.
int components_by_union_find(const SpectralCoverGraph& g) {
    std::vector<int> parent(static_cast<std::size_t>(g.num_nodes()));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (auto [a, b] : g.edges) parent[static_cast<std::size_t>(find(a))] = find(b);
    std::set<int> roots;
    for (int v = 0; v < g.num_nodes(); ++v) roots.insert(find(v));
    return static_cast<int>(roots.size());
}

}  // namespace

TEST_CASE("eigenline on diagonal operators") {
    // frame diag(sqrt(3), sqrt(2)) has operator diag(3, 2)
    auto f = operator_frame({{std::sqrt(3.0), 0.0}, {0.0, std::sqrt(2.0)}});
    auto v = eigenline(f, 1);
    CHECK(std::abs(std::abs(v(0)) - 1.0) <= 1e-12);
    CHECK(std::abs(v(1)) <= 1e-12);
    CHECK(v(0) > 0.0);  // sign rule: first nonzero coordinate positive

    auto w = eigenline(f, 2);
    CHECK(std::abs(w(0)) <= 1e-12);
    CHECK(w(1) > 0.0);

    CHECK_THROWS_AS(eigenline(f, 0), IndexOutOfRange);
    CHECK_THROWS_AS(eigenline(f, 3), IndexOutOfRange);
}

TEST_CASE("eigenline rejects repeated eigenvalues") {
    auto tight = operator_frame({{std::sqrt(2.0), 0.0}, {0.0, std::sqrt(2.0)}});
    try {
        eigenline(tight, 1);
        FAIL("expected NotIGeneric");
    } catch (const NotIGeneric& e) {
        CHECK(e.index == 1);
        CHECK(e.gap <= 1e-8);
    }
}

TEST_CASE("eigenline of a coupled operator") {
    // operator [[2, 1], [1, 2]] has eigenpairs (3, (1,1)/sqrt 2), (1, (1,-1)/sqrt 2);
    // build a frame with that operator via its principal square root
    Eigen::Matrix2d op;
    op << 2, 1, 1, 2;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(op);
    Eigen::Matrix2d root = es.operatorSqrt();
    RealFrame f{Eigen::MatrixXd(root)};
    CHECK(max_abs<Real>(frame_operator(f) - op) <= 1e-12);

    auto v = eigenline(f, 1);
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(v(0) == doctest::Approx(inv_sqrt2).epsilon(1e-10));
    CHECK(v(1) == doctest::Approx(inv_sqrt2).epsilon(1e-10));
    CHECK((op * v - 3.0 * v).cwiseAbs().maxCoeff() <= 1e-10);  // residual check
}

TEST_CASE("fixtures are 1-generic with gap at least 1/3") {
    for (int n : {8, 64}) {
        for (auto fixture : {mobius_fixture(n), trivial_fixture(n)}) {
            auto scan = bundle::genericity_scan(fixture);
            CHECK(scan.per_index_generic[0]);
            CHECK(scan.per_index_generic[1]);
            CHECK(scan.min_gap >= 1.0 / 3.0);
        }
    }
    CHECK_THROWS_AS(mobius_fixture(6), DomainError);
    CHECK_THROWS_AS(mobius_fixture(9), DomainError);
}

TEST_CASE("trivial fixture covers split, mobius covers connect") {
    auto trivial = spectral_cover(trivial_fixture(64), 1);
    CHECK(trivial.num_components() == 2);
    CHECK(trivial.ambiguous_edges.empty());
    CHECK(components_by_union_find(trivial) == 2);

    auto mobius = spectral_cover(mobius_fixture(64), 1);
    CHECK(mobius.num_components() == 1);
    CHECK(mobius.ambiguous_edges.empty());
    CHECK(components_by_union_find(mobius) == 1);
    CHECK(mobius.num_nodes() == 128);
}

TEST_CASE("deck involution is an automorphism and lifts are disjoint") {
    for (int n : {8, 32, 128}) {
        for (auto fixture : {mobius_fixture(n), trivial_fixture(n)}) {
            auto g = spectral_cover(fixture, 1);
            CHECK(g.deck_involution_is_automorphism());
            for (auto [a, b] : g.edges) CHECK(a / 2 != b / 2);  // never joins the two lifts
            CHECK(g.edges.size() == 2 * fixture.sample->edges.size());
        }
    }
}

TEST_CASE("component counts stay 1 and 2 under refinement") {
    for (int n = 8; n <= 512; n *= 2) {
        CHECK(spectral_cover(mobius_fixture(n), 1).num_components() == 1);
        CHECK(spectral_cover(trivial_fixture(n), 1).num_components() == 2);
    }
}

TEST_CASE("spectral_cover requires i-genericity") {
    auto sample = std::make_shared<const geo::ManifoldSample>(geo::fibonacci_sphere(32));
    auto parseval = bundle::projection_frame(sample);
    CHECK_THROWS_AS(spectral_cover(parseval, 1), NotIGeneric);
}

TEST_CASE("near-orthogonal eigenlines are recorded as ambiguous") {
    // two adjacent points whose top eigenlines differ by nearly 90 degrees
    auto sample = std::make_shared<const geo::ManifoldSample>(geo::circle_sample(8));
    bundle::BundleFrame b;
    b.sample = sample;
    for (int j = 0; j < 8; ++j) {
        double dir = (j == 3) ? std::numbers::pi / 2.0 * 0.99 : 0.0;
        Eigen::Vector2d u(std::cos(dir), std::sin(dir));
        Eigen::Vector2d w(-u.y(), u.x());
        Eigen::Matrix2d m = std::sqrt(2.0) * u * u.transpose() + w * w.transpose();
        b.frames.emplace_back(Eigen::MatrixXd(m));
    }
    auto g = spectral_cover(b, 1);
    CHECK(g.ambiguous_edges.size() == 2);  // both edges touching point 3

    auto report = obstruction_report(b, 1, {false, false});
    CHECK(report.verdict == Verdict::Ambiguous);
    CHECK(report.ambiguous_edge_count == 2);
    CHECK_FALSE(report.contradicted());
}

TEST_CASE("obstruction_report on the circle fixtures") {
    ManifoldFlags circle{false, false};

    auto trivial = obstruction_report(trivial_fixture(64), 1, circle);
    CHECK(trivial.verdict == Verdict::SectionExists);
    CHECK(trivial.cover_components == 2);
    CHECK_FALSE(trivial.contradicted());

    auto mobius = obstruction_report(mobius_fixture(64), 1, circle);
    CHECK(mobius.verdict == Verdict::ConnectedCover);
    CHECK(mobius.cover_components == 1);
    CHECK_FALSE(mobius.contradicted());
}

TEST_CASE("obstruction_report on the sphere") {
    ManifoldFlags sphere{true, true};
    auto sample = std::make_shared<const geo::ManifoldSample>(geo::fibonacci_sphere(256));

    // the projection Parseval frame is maximally degenerate
    auto parseval = obstruction_report(bundle::projection_frame(sample), 1, sphere);
    CHECK(parseval.verdict == Verdict::DegeneracyOnSample);
    CHECK_FALSE(parseval.generic_on_sample);

    // random frames: never an uncontradicted section claim
    Tolerance tol{1e-10, 1e-3};
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto b = bundle::random_bundle_frame(sample, 3, seed);
        for (int i = 1; i <= 2; ++i) {
            auto r = obstruction_report(b, i, sphere, tol);
            CHECK_FALSE((r.verdict == Verdict::SectionExists && !r.contradicted()));
        }
    }
}

TEST_CASE("synthetic split cover over a nonzero Euler class is flagged") {
    // a constant eigenline is impossible for genuinely smooth data over the
    // sphere; feeding one in anyway must surface the Euler contradiction
    auto sample = std::make_shared<const geo::ManifoldSample>(geo::fibonacci_sphere(64));
    bundle::BundleFrame b;
    b.sample = sample;
    Eigen::Matrix2d m = Eigen::Vector2d(std::sqrt(3.0), 1.0).asDiagonal();
    for (int p = 0; p < 64; ++p) b.frames.emplace_back(Eigen::MatrixXd(m));
    auto r = obstruction_report(b, 1, {true, true});
    CHECK(r.verdict == Verdict::SectionExists);
    CHECK(r.contradiction == Contradiction::EulerClass);
}

TEST_CASE("cover and report serialize to json") {
    auto g = spectral_cover(mobius_fixture(16), 1);
    auto doc = to_json(g);
    CHECK(doc["base_points"] == 16);
    CHECK(doc["nodes"] == 32);
    CHECK(doc["components"] == 1);
    CHECK(doc["edges"].size() == g.edges.size());

    auto r = obstruction_report(mobius_fixture(16), 1, {false, false});
    auto rdoc = to_json(r);
    CHECK(rdoc["verdict"] == "ConnectedCover");
    CHECK(rdoc["contradiction"] == "none");
    CHECK(rdoc["generic_on_sample"] == true);
}
