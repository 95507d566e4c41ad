#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "parframe/errors.hpp"
#include "parframe/rng.hpp"

namespace parframe {

using Real = double;
using Complex = std::complex<double>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Thresholds for the finite-precision predicates. abs_tol is the floor for
/// "numerically zero" (eigenvalues, max-norm deviations); rel_gap is the
/// relative spectral-gap threshold used when grouping eigenvalues into
/// multiplicity classes.
struct Tolerance {
    double abs_tol = 1e-10;
    double rel_gap = 1e-8;
};

/// A frame candidate: the k x n synthesis matrix whose columns are the frame
/// vectors in fiber coordinates. Shape invariants (k >= 1, n >= k) are
/// enforced on construction; the rank condition is not -- a value that fails
/// is_frame() is a candidate, not a frame.
template <class Scalar>
class Frame {
public:
    explicit Frame(Matrix<Scalar> entries) : entries_(std::move(entries)) {
        if (entries_.rows() < 1)
            throw DomainError("frame fiber dimension k must be >= 1");
        if (entries_.cols() < entries_.rows())
            throw DomainError("frame size n must be >= fiber dimension k");
    }

    Eigen::Index fiber_dim() const { return entries_.rows(); }  // k
    Eigen::Index size() const { return entries_.cols(); }       // n
    const Matrix<Scalar>& entries() const { return entries_; }

private:
    Matrix<Scalar> entries_;
};

using RealFrame = Frame<Real>;
using ComplexFrame = Frame<Complex>;

/// k x k self-adjoint frame operator A A^H (positive definite exactly when A
/// is a frame).
template <class Scalar>
using FrameOperator = Matrix<Scalar>;

/// Descending eigenvalues of a frame operator; strictly positive when the
/// source is a frame.
class Spectrum {
public:
    explicit Spectrum(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw DomainError("spectrum must be non-empty");
        for (std::size_t i = 0; i + 1 < values_.size(); ++i)
            if (values_[i] < values_[i + 1])
                throw DomainError("spectrum values must be descending");
    }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

namespace detail {

template <class Scalar>
double max_abs(const Matrix<Scalar>& m) {
    return m.cwiseAbs().maxCoeff();
}

/// Eigendecomposition of a self-adjoint operator; eigenvalues ascending
/// (Eigen's convention -- callers reverse for the descending spectrum).
template <class Scalar>
Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> self_adjoint_eigs(const Matrix<Scalar>& s) {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(s);
    if (es.info() != Eigen::Success)
        throw Error("self-adjoint eigendecomposition failed to converge");
    return es;
}

}  // namespace detail

template <class Scalar>
FrameOperator<Scalar> frame_operator(const Frame<Scalar>& a) {
    return a.entries() * a.entries().adjoint();
}

/// True iff the smallest eigenvalue of the frame operator exceeds abs_tol.
template <class Scalar>
bool is_frame(const Frame<Scalar>& a, const Tolerance& tol = {}) {
    auto es = detail::self_adjoint_eigs<Scalar>(frame_operator(a));
    return es.eigenvalues().minCoeff() > tol.abs_tol;
}

/// True iff the frame operator is within abs_tol of the identity (max norm).
template <class Scalar>
bool is_parseval(const Frame<Scalar>& a, const Tolerance& tol = {}) {
    Matrix<Scalar> dev = frame_operator(a);
    dev -= Matrix<Scalar>::Identity(a.fiber_dim(), a.fiber_dim());
    return detail::max_abs<Scalar>(dev) <= tol.abs_tol;
}

/// Returns the tight constant c (= trace / k) when the frame operator is
/// within abs_tol of c * I, absent otherwise.
template <class Scalar>
std::optional<double> is_tight(const Frame<Scalar>& a, const Tolerance& tol = {}) {
    Matrix<Scalar> s = frame_operator(a);
    double c = std::real(s.trace()) / static_cast<double>(a.fiber_dim());
    Matrix<Scalar> dev = s - c * Matrix<Scalar>::Identity(a.fiber_dim(), a.fiber_dim());
    if (detail::max_abs<Scalar>(dev) <= tol.abs_tol && c > 0.0) return c;
    return std::nullopt;
}

namespace detail {

/// Shared eigendecomposition step for the retraction family: throws NotAFrame
/// when the operator is numerically singular.
template <class Scalar>
Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> frame_eigs_checked(const Frame<Scalar>& a,
                                                                 const Tolerance& tol) {
    auto es = self_adjoint_eigs<Scalar>(frame_operator(a));
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig <= tol.abs_tol) throw NotAFrame(min_eig);
    return es;
}

}  // namespace detail

/// Nearest Parseval frame B = P^{-1} A, with P the principal square root of
/// the frame operator. B spans the same row space as A: B^H B is the
/// orthogonal projector onto it.
template <class Scalar>
Frame<Scalar> parseval_retract(const Frame<Scalar>& a, const Tolerance& tol = {}) {
    auto es = detail::frame_eigs_checked(a, tol);
    Vector<Scalar> inv_roots =
        es.eigenvalues().cwiseSqrt().cwiseInverse().template cast<Scalar>();
    Matrix<Scalar> p_inv =
        es.eigenvectors() * inv_roots.asDiagonal() * es.eigenvectors().adjoint();
    return Frame<Scalar>(p_inv * a.entries());
}

/// Straight-line homotopy from A (t = 0) to its Parseval retraction (t = 1):
/// P_t B with P_t = (1 - t) P + t I. Every intermediate value is a frame.
template <class Scalar>
Frame<Scalar> retract_path(const Frame<Scalar>& a, double t, const Tolerance& tol = {}) {
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("retraction parameter t must lie in [0, 1]");
    auto es = detail::frame_eigs_checked(a, tol);
    Eigen::VectorXd roots = es.eigenvalues().cwiseSqrt();
    Vector<Scalar> path_diag =
        ((1.0 - t) * roots.array() + t).matrix().template cast<Scalar>();
    Vector<Scalar> inv_roots = roots.cwiseInverse().template cast<Scalar>();
    Matrix<Scalar> p_t =
        es.eigenvectors() * path_diag.asDiagonal() * es.eigenvectors().adjoint();
    Matrix<Scalar> p_inv =
        es.eigenvectors() * inv_roots.asDiagonal() * es.eigenvectors().adjoint();
    return Frame<Scalar>(p_t * (p_inv * a.entries()));
}

/// Descending eigenvalues of the frame operator.
template <class Scalar>
Spectrum spectrum(const Frame<Scalar>& a, const Tolerance& tol = {}) {
    auto es = detail::frame_eigs_checked(a, tol);
    const auto& asc = es.eigenvalues();
    std::vector<double> vals(asc.size());
    for (Eigen::Index i = 0; i < asc.size(); ++i)
        vals[static_cast<std::size_t>(i)] = asc(asc.size() - 1 - i);
    return Spectrum(std::move(vals));
}

/// Multiplicity of each entry under relative-gap grouping: consecutive
/// entries join the same group while (x_i - x_{i+1}) / x_1 <= rel_gap.
/// rel_gap = 0 reduces to exact equality.
inline std::vector<int> multiplicities(const Spectrum& x, const Tolerance& tol = {}) {
    const auto& v = x.values();
    const std::size_t k = v.size();
    double denom = std::abs(v[0]);
    std::vector<int> mu(k, 0);
    std::size_t group_start = 0;
    for (std::size_t i = 0; i < k; ++i) {
        bool last_in_group =
            (i + 1 == k) ||
            (denom == 0.0 ? v[i] != v[i + 1] : (v[i] - v[i + 1]) > tol.rel_gap * denom);
        if (last_in_group) {
            int size = static_cast<int>(i - group_start + 1);
            for (std::size_t j = group_start; j <= i; ++j) mu[j] = size;
            group_start = i + 1;
        }
    }
    return mu;
}

/// All eigenvalues simple.
template <class Scalar>
bool is_generic(const Frame<Scalar>& a, const Tolerance& tol = {}) {
    auto mu = multiplicities(spectrum(a, tol), tol);
    for (int m : mu)
        if (m != 1) return false;
    return true;
}

/// The i-th eigenvalue (1-based, descending order) is simple.
template <class Scalar>
bool i_generic(const Frame<Scalar>& a, int i, const Tolerance& tol = {}) {
    if (i < 1 || i > static_cast<int>(a.fiber_dim()))
        throw IndexOutOfRange("spectral index " + std::to_string(i) + " outside 1.." +
                              std::to_string(a.fiber_dim()));
    auto mu = multiplicities(spectrum(a, tol), tol);
    return mu[static_cast<std::size_t>(i - 1)] == 1;
}

/// Completes a Parseval frame B to an n x n orthogonal/unitary matrix whose
/// first k rows are B (copied bit for bit). Remaining rows come from
/// orthogonalizing standard basis vectors against the rows so far, picking
/// the candidate with the largest residual each round (ties by lower index).
template <class Scalar>
Matrix<Scalar> naimark_dilate(const Frame<Scalar>& b, const Tolerance& tol = {}) {
    {
        Matrix<Scalar> dev = frame_operator(b);
        dev -= Matrix<Scalar>::Identity(b.fiber_dim(), b.fiber_dim());
        double deviation = detail::max_abs<Scalar>(dev);
        if (deviation > tol.abs_tol) throw NotParseval(deviation);
    }
    const Eigen::Index k = b.fiber_dim();
    const Eigen::Index n = b.size();
    Matrix<Scalar> u(n, n);
    u.topRows(k) = b.entries();

    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Eigen::Index row = k; row < n; ++row) {
        Eigen::Index best = -1;
        double best_norm = -1.0;
        Vector<Scalar> best_residual;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            Vector<Scalar> r = Vector<Scalar>::Zero(n);
            r(j) = Scalar(1);
            for (Eigen::Index i = 0; i < row; ++i) {
                Vector<Scalar> v = u.row(i).transpose();
                r -= v * v.dot(r);
            }
            double norm = r.norm();
            if (norm > best_norm + 1e-12) {
                best_norm = norm;
                best = j;
                best_residual = std::move(r);
            }
        }
        if (best < 0 || best_norm <= 1e-8)
            throw Error("orthonormal completion failed: no independent basis vector left");
        used[static_cast<std::size_t>(best)] = true;
        // second orthogonalization pass tightens the result for near-degenerate picks
        for (Eigen::Index i = 0; i < row; ++i) {
            Vector<Scalar> v = u.row(i).transpose();
            best_residual -= v * v.dot(best_residual);
        }
        u.row(row) = (best_residual / best_residual.norm()).transpose();
    }
    return u;
}

/// Frame with i.i.d. standard normal entries (complex: independent normal
/// real and imaginary parts), resampled until is_frame holds. Deterministic
/// in the seed.
template <class Scalar>
Frame<Scalar> random_frame(Eigen::Index k, Eigen::Index n, std::uint64_t seed,
                           const Tolerance& tol = {}) {
    if (k < 1 || n < k) throw DomainError("random_frame requires n >= k >= 1");
    rng::Stream stream(rng::mix(seed, 0x66726d65));  // stream tag: frame entries
    constexpr int kMaxTries = 64;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
        Matrix<Scalar> m(k, n);
        for (Eigen::Index r = 0; r < k; ++r)
            for (Eigen::Index c = 0; c < n; ++c) {
                if constexpr (std::is_same_v<Scalar, Complex>)
                    m(r, c) = Complex(stream.normal(), stream.normal());
                else
                    m(r, c) = stream.normal();
            }
        Frame<Scalar> f(std::move(m));
        if (is_frame(f, tol)) return f;
    }
    throw GenerationFailed("random_frame: no full-rank sample after " +
                           std::to_string(kMaxTries) + " tries");
}

}  // namespace parframe
