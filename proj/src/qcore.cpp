#include "qarrow/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qarrow/errors.hpp"

namespace qarrow {

namespace {

constexpr double kEigenClip = 1e-12;
constexpr double kEntropyFloor = 1e-15;
constexpr double kSupportFloor = 1e-12;

Eigensystem2 hermitian_eigensystem(const Mat2& m) {
    Eigen::SelfAdjointEigenSolver<Mat2> solver(m);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double xlogx(double p) { return p < kEntropyFloor ? 0.0 : p * std::log(p); }

}  // namespace

double max_abs_diff(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------

HermitianOperator2::HermitianOperator2(const Mat2& m) : m_(m) {
    if (!m.allFinite()) throw ValidationError("operator has non-finite entries");
    const double defect = max_abs_diff(m, m.adjoint());
    if (defect > kTolerance)
        throw ValidationError("operator is not Hermitian (defect " + std::to_string(defect) + ")");
    m_ = 0.5 * (m + m.adjoint());
}

Eigensystem2 HermitianOperator2::eigensystem() const { return hermitian_eigensystem(m_); }

HermitianOperator2 operator*(double s, const HermitianOperator2& h) {
    return HermitianOperator2(s * h.m_, HermitianOperator2::Unchecked{});
}

HermitianOperator2 operator+(const HermitianOperator2& a, const HermitianOperator2& b) {
    return HermitianOperator2(a.m_ + b.m_, HermitianOperator2::Unchecked{});
}

HermitianOperator2 operator-(const HermitianOperator2& h) {
    return HermitianOperator2(-h.m_, HermitianOperator2::Unchecked{});
}

// ---------------------------------------------------------------------------

Unitary2::Unitary2(const Mat2& m, double tol) : m_(m) {
    const double defect = unitarity_defect(m);
    if (!(defect <= tol))
        throw ToleranceError("matrix is not unitary (defect " + std::to_string(defect) + ")");
}

Unitary2 Unitary2::identity() { return Unitary2(Mat2::Identity(), Unchecked{}); }

Unitary2 Unitary2::adjoint() const { return Unitary2(m_.adjoint(), Unchecked{}); }

double Unitary2::unitarity_defect(const Mat2& m) {
    return max_abs_diff(m * m.adjoint(), Mat2::Identity());
}

Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
    return Unitary2(a.m_ * b.m_, Unitary2::Unchecked{});
}

Unitary2 su2_exponential(const std::array<double, 3>& theta_vec) {
    const double theta = std::hypot(theta_vec[0], theta_vec[1], theta_vec[2]);
    if (theta == 0.0) return Unitary2::identity();
    const double c = std::cos(theta);
    const double s = std::sin(theta) / theta;
    const double ax = s * theta_vec[0];
    const double ay = s * theta_vec[1];
    const double az = s * theta_vec[2];
    // cos(theta) I - i sin(theta) n.sigma
    Mat2 m;
    m << Complex(c, -az), Complex(-ay, -ax),
         Complex(ay, -ax), Complex(c, az);
    return Unitary2(m);
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(const Mat2& m) : m_(m) {
    if (!m.allFinite()) throw ValidationError("density matrix has non-finite entries");
    if (max_abs_diff(m, m.adjoint()) > kTolerance)
        throw ValidationError("density matrix is not Hermitian");
    if (std::abs(m.trace() - Complex(1.0, 0.0)) > kTolerance)
        throw ValidationError("density matrix trace differs from 1");
    m_ = 0.5 * (m + m.adjoint());
    const auto eig = hermitian_eigensystem(m_);
    if (eig.values(0) < -kEigenClip)
        throw ValidationError("density matrix has a negative eigenvalue " +
                              std::to_string(eig.values(0)));
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(0.5 * Mat2::Identity()); }

DensityMatrix DensityMatrix::from_bloch(const BlochVector& r) {
    const double norm = std::hypot(r[0], r[1], r[2]);
    if (norm > 1.0 + kEigenClip) throw ValidationError("Bloch vector longer than 1");
    Mat2 m;
    m << Complex(1.0 + r[2], 0.0), Complex(r[0], -r[1]),
         Complex(r[0], r[1]), Complex(1.0 - r[2], 0.0);
    return DensityMatrix(0.5 * m);
}

Eigensystem2 DensityMatrix::eigensystem() const {
    auto eig = hermitian_eigensystem(m_);
    for (int k = 0; k < 2; ++k) eig.values(k) = std::clamp(eig.values(k), 0.0, 1.0);
    return eig;
}

DensityMatrix DensityMatrix::conjugated(const Unitary2& u) const {
    const Mat2 out = u.matrix() * m_ * u.matrix().adjoint();
    return DensityMatrix(0.5 * (out + out.adjoint()));
}

// ---------------------------------------------------------------------------

InverseTemperature::InverseTemperature(double beta_h) : beta_h_(beta_h) {
    if (!std::isfinite(beta_h) || beta_h < 0.0)
        throw DomainError("inverse temperature must be finite and non-negative");
}

InverseTemperature InverseTemperature::from_thermal_energy_khz(double kT_over_h_khz) {
    if (!(kT_over_h_khz > 0.0) || !std::isfinite(kT_over_h_khz))
        throw DomainError("thermal energy must be positive and finite");
    return InverseTemperature(1.0 / kT_over_h_khz);
}

// ---------------------------------------------------------------------------

HermitianOperator2 pauli(Axis axis) {
    Mat2 m;
    switch (axis) {
        case Axis::x: m << 0.0, 1.0, 1.0, 0.0; break;
        case Axis::y: m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0; break;
        case Axis::z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return HermitianOperator2(m);
}

DensityMatrix gibbs_state(const HermitianOperator2& h, InverseTemperature beta) {
    const auto eig = h.eigensystem();
    const double b = beta.value();
    // Shift by the ground energy so the largest weight is exactly 1.
    Eigen::Vector2d w;
    for (int k = 0; k < 2; ++k) w(k) = std::exp(-b * (eig.values(k) - eig.values(0)));
    w /= w.sum();
    const Mat2 rho = eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

double vn_entropy(const DensityMatrix& rho) {
    const auto eig = rho.eigensystem();
    return -(xlogx(eig.values(0)) + xlogx(eig.values(1)));
}

double kl_divergence(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const auto er = rho.eigensystem();
    const auto es = sigma.eigensystem();

    // tr(rho ln sigma) = sum_j ln(q_j) <b_j|rho|b_j>
    double cross = 0.0;
    for (int j = 0; j < 2; ++j) {
        const auto b = es.vectors.col(j);
        const double weight = (b.adjoint() * rho.matrix() * b)(0, 0).real();
        const double q = es.values(j);
        if (q <= kSupportFloor) {
            if (weight > kSupportFloor)
                throw SupportError("relative entropy is infinite: rho has weight outside supp(sigma)");
            continue;
        }
        cross += weight * std::log(q);
    }
    const double self = xlogx(er.values(0)) + xlogx(er.values(1));
    return self - cross;
}

BlochVector bloch_vector(const DensityMatrix& rho) {
    const Mat2& m = rho.matrix();
    return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const Mat2 diff = rho.matrix() - sigma.matrix();
    const auto eig = hermitian_eigensystem(0.5 * (diff + diff.adjoint()));
    return 0.5 * (std::abs(eig.values(0)) + std::abs(eig.values(1)));
}

}  // namespace qarrow
