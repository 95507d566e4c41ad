#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "parframe/bundle.hpp"
#include "parframe/frame.hpp"

namespace parframe::recon {

/// Analysis measurement A^H v: the coefficient vector of v against the frame.
/// Needs no frame property beyond matching shapes.
template <class Scalar>
Vector<Scalar> measure(const Frame<Scalar>& frame, const Vector<Scalar>& v) {
    if (v.size() != frame.fiber_dim())
        throw DimensionMismatch("measure: vector length " + std::to_string(v.size()) +
                                " does not match fiber dimension " +
                                std::to_string(frame.fiber_dim()));
    return frame.entries().adjoint() * v;
}

/// Least-squares reconstruction (A A^H)^{-1} A . data; inverts measure()
/// exactly in the absence of noise.
template <class Scalar>
Vector<Scalar> reconstruct(const Frame<Scalar>& frame, const Vector<Scalar>& data,
                           const Tolerance& tol = {}) {
    if (data.size() != frame.size())
        throw DimensionMismatch("reconstruct: data length " + std::to_string(data.size()) +
                                " does not match frame size " + std::to_string(frame.size()));
    auto es = detail::frame_eigs_checked(frame, tol);
    Vector<Scalar> inv = es.eigenvalues().cwiseInverse().template cast<Scalar>();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint() *
           (frame.entries() * data);
}

/// Mean over sample points of the squared reconstruction error under
/// i.i.d. gaussian measurement noise with the given per-coordinate variance.
/// Noise is sub-seeded per point, so the result does not depend on
/// evaluation order. Variance 0 forces the noise to zero.
double field_mse(const bundle::BundleFrame& frames, const bundle::VectorField& field,
                 double noise_variance, std::uint64_t seed);

struct ExperimentConfig {
    int num_random_frames = 1000;
    int num_fields = 1000;
    double noise_variance = 0.01;
    std::string source_kind = "fibonacci";  // "fibonacci" | "file"
    int fibonacci_n = 1592;
    std::string file_path;
    std::uint64_t master_seed = 0;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
    static ExperimentConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

struct FrameSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    bool failed = false;  // generation failed; MSE row is NaN
};

struct MseReport {
    ExperimentConfig config;
    std::vector<double> parseval_mses;   // one per field
    Eigen::MatrixXd random_frame_mses;   // frame x field
    FrameSummary parseval_summary;
    std::vector<FrameSummary> random_summaries;
    std::vector<double> cdf_parseval;     // sorted copy of parseval_mses
    std::vector<double> cdf_best_random;  // sorted MSEs of the best random frame
    int best_random_frame = -1;           // lowest mean MSE, ties to lower index
    std::vector<std::string> diagnostics;
    std::string generator_id;
};

/// Builds the sample, the projection Parseval frame, the random bundle
/// frames and vector fields, and fills the full (frame x field) MSE grid
/// with independently sub-seeded noise. Bit-identical across runs and
/// thread counts for a fixed master seed.
MseReport run_experiment(const ExperimentConfig& config);

/// Writes mse_parseval.csv, mse_random.csv, cdf_parseval.csv,
/// cdf_best_random.csv, histograms.csv (64 shared bins) and summary.json
/// into out_dir.
void emit_report(const MseReport& report, const std::string& out_dir);

/// One-line human summary: Parseval mean, best random mean, separation ratio.
std::string summary_line(const MseReport& report);

}  // namespace parframe::recon
