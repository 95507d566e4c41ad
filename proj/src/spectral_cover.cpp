#include "parframe/spectral_cover.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <set>

namespace parframe::cover {

namespace {

/// Smallest normalized gap isolating index i (1-based) in a descending
/// spectrum; the margin that NotIGeneric reports.
double isolation_gap(const Spectrum& spec, int i) {
    const int k = static_cast<int>(spec.size());
    double gap = std::numeric_limits<double>::infinity();
    if (i > 1)
        gap = std::min(gap, (spec[static_cast<std::size_t>(i - 2)] -
                             spec[static_cast<std::size_t>(i - 1)]) /
                                spec[0]);
    if (i < k)
        gap = std::min(gap, (spec[static_cast<std::size_t>(i - 1)] -
                             spec[static_cast<std::size_t>(i)]) /
                                spec[0]);
    return std::isfinite(gap) ? gap : 1.0;  // k = 1: nothing to collide with
}

}  // namespace

Eigen::VectorXd eigenline(const RealFrame& frame, int i, const Tolerance& tol) {
    const int k = static_cast<int>(frame.fiber_dim());
    if (i < 1 || i > k)
        throw IndexOutOfRange("spectral index " + std::to_string(i) + " outside 1.." +
                              std::to_string(k));
    auto es = detail::frame_eigs_checked(frame, tol);
    const auto& asc = es.eigenvalues();
    std::vector<double> desc(asc.size());
    for (Eigen::Index j = 0; j < asc.size(); ++j)
        desc[static_cast<std::size_t>(j)] = asc(asc.size() - 1 - j);
    Spectrum spec(desc);
    auto mu = multiplicities(spec, tol);
    if (mu[static_cast<std::size_t>(i - 1)] != 1)
        throw NotIGeneric(i, isolation_gap(spec, i));

    Eigen::VectorXd v = es.eigenvectors().col(asc.size() - i);
    for (Eigen::Index c = 0; c < v.size(); ++c) {
        if (std::abs(v(c)) > 1e-12) {
            if (v(c) < 0.0) v = -v;
            break;
        }
    }
    return v;
}

int SpectralCoverGraph::num_components() const { return static_cast<int>(
    std::set<int>(component_labels().begin(), component_labels().end()).size()); }

std::vector<int> SpectralCoverGraph::component_labels() const {
    const int n = num_nodes();
    std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n));
    for (const auto& [a, b] : edges) {
        adjacency[static_cast<std::size_t>(a)].push_back(b);
        adjacency[static_cast<std::size_t>(b)].push_back(a);
    }
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    for (int start = 0; start < n; ++start) {
        if (label[static_cast<std::size_t>(start)] >= 0) continue;
        std::deque<int> queue{start};
        label[static_cast<std::size_t>(start)] = start;  // smallest id reached first
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int w : adjacency[static_cast<std::size_t>(u)]) {
                if (label[static_cast<std::size_t>(w)] < 0) {
                    label[static_cast<std::size_t>(w)] = start;
                    queue.push_back(w);
                }
            }
        }
    }
    return label;
}

bool SpectralCoverGraph::deck_involution_is_automorphism() const {
    std::set<std::pair<int, int>> edge_set(edges.begin(), edges.end());
    auto flip = [](int node) { return node ^ 1; };
    for (const auto& [a, b] : edges) {
        int fa = flip(a), fb = flip(b);
        if (!edge_set.count({std::min(fa, fb), std::max(fa, fb)})) return false;
    }
    return true;
}

SpectralCoverGraph spectral_cover(const bundle::BundleFrame& b, int i, const Tolerance& tol) {
    if (!b.sample) throw DomainError("spectral_cover: bundle frame has no sample");
    const int num_points = b.num_points();

    std::vector<Eigen::VectorXd> lines;
    lines.reserve(static_cast<std::size_t>(num_points));
    for (int p = 0; p < num_points; ++p) {
        try {
            lines.push_back(eigenline(b.frames[static_cast<std::size_t>(p)], i, tol));
        } catch (const NotIGeneric& e) {
            throw NotIGeneric(e.index, e.gap, p);
        }
    }

    SpectralCoverGraph g;
    g.base_points = num_points;
    g.index = i;
    for (const auto& [p, q] : b.sample->edges) {
        double align = lines[static_cast<std::size_t>(p)].dot(lines[static_cast<std::size_t>(q)]);
        if (std::abs(align) <= kAlignTol) {
            g.ambiguous_edges.emplace_back(p, q);
            continue;
        }
        int s = align > 0.0 ? 0 : 1;  // sign-preserving or sign-reversing lift
        for (int lift = 0; lift < 2; ++lift) {
            int a = SpectralCoverGraph::node_id(p, lift);
            int c = SpectralCoverGraph::node_id(q, lift ^ s);
            g.edges.emplace_back(std::min(a, c), std::max(a, c));
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

namespace {

/// Rank-2 frame over the circle with eigenvalues (2, 1) and prescribed top
/// eigenline direction: A = sqrt(2) u u^T + w w^T, so A A^T = 2 u u^T + w w^T.
RealFrame oriented_fixture_frame(const Eigen::Vector2d& u) {
    Eigen::Vector2d w(-u.y(), u.x());
    Eigen::Matrix2d m = std::sqrt(2.0) * u * u.transpose() + w * w.transpose();
    return RealFrame(m);
}

bundle::BundleFrame circle_fixture(int n, bool rotate_half) {
    if (n < 8 || n % 2 != 0)
        throw DomainError("fixture needs an even number of points, at least 8");
    auto sample = std::make_shared<const geo::ManifoldSample>(geo::circle_sample(n));
    bundle::BundleFrame b;
    b.sample = sample;
    b.frames.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double theta = 2.0 * std::numbers::pi * j / n;
        double dir = rotate_half ? theta / 2.0 : 0.0;
        b.frames.push_back(oriented_fixture_frame({std::cos(dir), std::sin(dir)}));
    }
    return b;
}

}  // namespace

bundle::BundleFrame mobius_fixture(int n) { return circle_fixture(n, true); }
bundle::BundleFrame trivial_fixture(int n) { return circle_fixture(n, false); }

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::SectionExists: return "SectionExists";
        case Verdict::ConnectedCover: return "ConnectedCover";
        case Verdict::DegeneracyOnSample: return "DegeneracyOnSample";
        case Verdict::Ambiguous: return "Ambiguous";
    }
    return "?";
}

const char* to_string(Contradiction c) {
    switch (c) {
        case Contradiction::None: return "none";
        case Contradiction::EulerClass: return "euler_class";
        case Contradiction::H1Z2: return "h1_z2";
    }
    return "?";
}

ObstructionReport obstruction_report(const bundle::BundleFrame& b, int i, ManifoldFlags flags,
                                     const Tolerance& tol) {
    ObstructionReport r;
    r.index = i;

    auto scan = bundle::genericity_scan(b, tol);
    r.generic_on_sample = i >= 1 && i <= static_cast<int>(scan.per_index_generic.size()) &&
                          scan.per_index_generic[static_cast<std::size_t>(i - 1)];
    if (!r.generic_on_sample) {
        r.verdict = Verdict::DegeneracyOnSample;
        r.reason = "eigenvalue " + std::to_string(i) +
                   " has multiplicity > 1 at some sample point; no cover to build";
        return r;
    }

    SpectralCoverGraph g = spectral_cover(b, i, tol);
    r.ambiguous_edge_count = static_cast<int>(g.ambiguous_edges.size());
    if (r.ambiguous_edge_count > 0) {
        r.verdict = Verdict::Ambiguous;
        r.reason = std::to_string(r.ambiguous_edge_count) +
                   " edge(s) with near-orthogonal eigenlines; the sample under-resolves "
                   "the cover";
        return r;
    }

    r.cover_components = g.num_components();
    if (r.cover_components >= 2) {
        r.verdict = Verdict::SectionExists;
        r.reason = "cover splits: a global unit eigenvector section exists on the sample";
        if (flags.euler_nonzero) {
            r.contradiction = Contradiction::EulerClass;
            r.reason += "; contradicts the nonzero Euler class (a nowhere-zero section "
                        "would exist), so genericity must fail between sample points";
        }
    } else {
        r.verdict = Verdict::ConnectedCover;
        r.reason = "cover is connected: the eigenline reverses around some loop";
        if (flags.h1_z2_trivial) {
            r.contradiction = Contradiction::H1Z2;
            r.reason += "; contradicts H_1(M, Z/2) = 0 (no surjection onto Z/2 exists), "
                        "so genericity must fail between sample points";
        }
    }
    return r;
}

nlohmann::json to_json(const SpectralCoverGraph& g) {
    nlohmann::json doc;
    doc["base_points"] = g.base_points;
    doc["index"] = g.index;
    doc["nodes"] = g.num_nodes();
    doc["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) doc["edges"].push_back({a, b});
    doc["ambiguous_edges"] = nlohmann::json::array();
    for (const auto& [a, b] : g.ambiguous_edges) doc["ambiguous_edges"].push_back({a, b});
    doc["components"] = g.num_components();
    return doc;
}

nlohmann::json to_json(const ObstructionReport& r) {
    return {{"index", r.index},
            {"generic_on_sample", r.generic_on_sample},
            {"cover_components", r.cover_components},
            {"ambiguous_edges", r.ambiguous_edge_count},
            {"verdict", to_string(r.verdict)},
            {"contradiction", to_string(r.contradiction)},
            {"reason", r.reason}};
}

}  // namespace parframe::cover
