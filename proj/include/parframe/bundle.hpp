#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <vector>

#include "parframe/frame.hpp"
#include "parframe/manifold.hpp"

namespace parframe::bundle {

using SamplePtr = std::shared_ptr<const geo::ManifoldSample>;

/// Smooth deterministic field R^3 -> R^3: a sum of sinusoidal waves
/// F(x) = sum_w a_w sin(kappa_w . x + phi_w) with amplitudes decaying as
/// decay^w and wave numbers |kappa_w| in [1, 8], all drawn from the seed.
class NoiseField {
public:
    explicit NoiseField(std::uint64_t seed, int num_waves = 16, double decay = 0.7);

    Eigen::Vector3d operator()(const Eigen::Vector3d& x) const;

    std::uint64_t seed() const { return seed_; }
    int num_waves() const { return static_cast<int>(amplitudes_.size()); }
    double decay() const { return decay_; }

    /// Lipschitz bound sum_w |a_w| |kappa_w| for the whole field.
    double lipschitz_bound() const;

private:
    std::uint64_t seed_;
    double decay_;
    std::vector<Eigen::Vector3d> amplitudes_;
    std::vector<Eigen::Vector3d> wave_vectors_;
    std::vector<double> phases_;
};

inline Eigen::Vector3d noise_eval(const NoiseField& f, const Eigen::Vector3d& x) {
    return f(x);
}

/// How a generated BundleFrame was produced; carried into serialized output.
struct NoiseProvenance {
    std::uint64_t seed = 0;
    int num_waves = 16;
    double decay = 0.7;
    int attempt = 0;  // resampling round that produced the accepted frame
};

/// One k x n frame per sample point, written in that point's intrinsic
/// tangent coordinates. Everywhere a frame (per-point is_frame holds for
/// generated values; validate() re-checks).
struct BundleFrame {
    SamplePtr sample;
    std::vector<RealFrame> frames;
    std::optional<NoiseProvenance> provenance;

    int num_points() const { return static_cast<int>(frames.size()); }
    int fiber_dim() const { return frames.empty() ? 0 : static_cast<int>(frames.front().fiber_dim()); }
    int frame_size() const { return frames.empty() ? 0 : static_cast<int>(frames.front().size()); }

    /// Checks one-frame-per-point, shared (k, n), and per-point is_frame.
    void validate(const Tolerance& tol = {}) const;
};

/// One intrinsic k-vector per sample point.
struct VectorField {
    SamplePtr sample;
    Eigen::MatrixXd vectors;  // N x k
    std::optional<NoiseProvenance> provenance;
};

/// The tangent-space projections of the ambient standard basis: at each point
/// the frame is the tangent-basis matrix itself (column i = T_p e_i), which
/// is Parseval by construction. Frame size n equals the ambient dimension.
BundleFrame projection_frame(SamplePtr sample);

/// Three independent noise fields, normalized to unit ambient vectors and
/// projected to the tangent plane pointwise. The whole bundle frame is
/// resampled (next sub-seed) until every per-point frame passes is_frame.
/// Requires a sphere-type sample (k = 2, m = 3) and n = 3.
BundleFrame random_bundle_frame(SamplePtr sample, int n, std::uint64_t seed);

/// Projects an ambient field to intrinsic tangent coordinates pointwise:
/// v(p) = T_p F(p).
VectorField project_ambient_field(SamplePtr sample,
                                  const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& field);

/// Tangent projection of one noise field; deterministic in the seed.
VectorField random_vector_field(SamplePtr sample, std::uint64_t seed);

/// Pointwise Parseval retraction; NotAFrame failures carry the point index.
BundleFrame bundle_parsevalize(const BundleFrame& b, const Tolerance& tol = {});

struct GenericityReport {
    double min_gap = 0.0;                 // min over points of min_i (l_i - l_{i+1}) / l_1
    int argmin_point = -1;
    std::vector<bool> per_index_generic;  // [i]: multiplicity 1 at every point
};

GenericityReport genericity_scan(const BundleFrame& b, const Tolerance& tol = {});

nlohmann::json to_json(const BundleFrame& b);
nlohmann::json to_json(const VectorField& v);
BundleFrame bundle_from_json(const nlohmann::json& doc, SamplePtr sample);
VectorField field_from_json(const nlohmann::json& doc, SamplePtr sample);

}  // namespace parframe::bundle
