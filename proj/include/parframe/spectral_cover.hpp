#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <utility>
#include <vector>

#include "parframe/bundle.hpp"
#include "parframe/frame.hpp"

namespace parframe::cover {

/// Edges whose eigenline alignment |<v_p, v_q>| falls at or below this
/// threshold are recorded as ambiguous and left out of the cover instead of
/// being guessed.
inline constexpr double kAlignTol = 0.1;

/// Unit eigenvector of the frame operator for the i-th eigenvalue (1-based,
/// descending). Requires multiplicity 1 at the tolerance; the returned sign
/// follows a fixed rule (first nonzero coordinate positive) but callers must
/// treat the result as +-v.
Eigen::VectorXd eigenline(const RealFrame& frame, int i, const Tolerance& tol = {});

/// The unit-eigenvector double cover of the sample's neighbor graph for one
/// spectral index: two lift nodes per base point, two lift edges per
/// confidently aligned base edge.
struct SpectralCoverGraph {
    int base_points = 0;
    int index = 0;  // spectral index covered (1-based)
    std::vector<std::pair<int, int>> edges;            // between lift node ids
    std::vector<std::pair<int, int>> ambiguous_edges;  // base edges omitted

    /// Lift node id for (point, sign), sign in {0 (+), 1 (-)}.
    static int node_id(int point, int sign) { return 2 * point + sign; }
    int num_nodes() const { return 2 * base_points; }

    /// Connected-component count by breadth-first search.
    int num_components() const;
    /// Per-node component labels, canonicalized to the smallest node id in
    /// each component.
    std::vector<int> component_labels() const;
    /// True when the sign flip (p, s) -> (p, 1-s) maps the edge set to itself.
    bool deck_involution_is_automorphism() const;
};

SpectralCoverGraph spectral_cover(const bundle::BundleFrame& b, int i, const Tolerance& tol = {});

/// Validation fixtures over circle_sample(N): rank-2 frames with spectrum
/// (2, 1) whose top eigenline at angle theta points along theta / 2 (mobius;
/// the line reverses over a full loop) or along a fixed direction (trivial).
/// N must be even and >= 8.
bundle::BundleFrame mobius_fixture(int n);
bundle::BundleFrame trivial_fixture(int n);

/// Topological facts about the continuum manifold, supplied by the caller.
struct ManifoldFlags {
    bool euler_nonzero = false;
    bool h1_z2_trivial = false;
};

enum class Verdict { SectionExists, ConnectedCover, DegeneracyOnSample, Ambiguous };

/// What a cover observation contradicts, given the manifold flags. Any value
/// other than None means genericity must fail somewhere between sample points.
enum class Contradiction { None, EulerClass, H1Z2 };

struct ObstructionReport {
    int index = 0;
    bool generic_on_sample = false;
    int cover_components = 0;  // 0 when the cover was not built
    int ambiguous_edge_count = 0;
    Verdict verdict = Verdict::DegeneracyOnSample;
    Contradiction contradiction = Contradiction::None;
    std::string reason;

    bool contradicted() const { return contradiction != Contradiction::None; }
};

const char* to_string(Verdict v);
const char* to_string(Contradiction c);

/// Applies the eigenline double-cover obstruction logic: a split cover means
/// an eigenline section exists on the sample (impossible over a nonzero Euler
/// class), a connected cover corresponds to a surjection pi_1 -> Z/2
/// (impossible when H_1(M, Z/2) = 0).
ObstructionReport obstruction_report(const bundle::BundleFrame& b, int i, ManifoldFlags flags,
                                     const Tolerance& tol = {});

nlohmann::json to_json(const SpectralCoverGraph& g);
nlohmann::json to_json(const ObstructionReport& r);

}  // namespace parframe::cover
