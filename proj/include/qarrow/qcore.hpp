#pragma once

// Exact 2x2 complex linear algebra for a single qubit: operators, states,
// entropies, divergences and Bloch coordinates.
//
// Unit convention: energies are stored as E/h in kHz, so the quench
// Hamiltonian 2*pi*hbar*nu*sigma has entries +-nu. Inverse temperatures are
// stored as beta*h in (kHz)^-1, making every beta*E product dimensionless.
// All entropies are in nats.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace qarrow {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using BlochVector = std::array<double, 3>;

/// k_B T / h of the reference experiment, in kHz. Only used as a default.
inline constexpr double kReferenceThermalEnergyKHz = 1.56;
/// The same temperature expressed in nanokelvin (h * 1.56 kHz / k_B).
inline constexpr double kReferenceTemperatureNanoKelvin = 74.87;

enum class Axis { x, y, z };

/// Eigen-decomposition of a 2x2 Hermitian matrix, eigenvalues ascending.
struct Eigensystem2 {
    Eigen::Vector2d values;
    Mat2 vectors;  ///< column k is the eigenvector of values(k)
};

class HermitianOperator2 {
public:
    static constexpr double kTolerance = 1e-12;

    /// Throws ValidationError unless `m` equals its adjoint to kTolerance.
    explicit HermitianOperator2(const Mat2& m);

    [[nodiscard]] const Mat2& matrix() const noexcept { return m_; }
    [[nodiscard]] Eigensystem2 eigensystem() const;

    friend HermitianOperator2 operator*(double s, const HermitianOperator2& h);
    friend HermitianOperator2 operator+(const HermitianOperator2& a, const HermitianOperator2& b);
    friend HermitianOperator2 operator-(const HermitianOperator2& h);

private:
    struct Unchecked {};
    HermitianOperator2(const Mat2& m, Unchecked) : m_(m) {}
    Mat2 m_;
};

class Unitary2 {
public:
    static constexpr double kDefaultTolerance = 1e-10;

    /// Throws ToleranceError unless U U^dagger = I to `tol` entrywise.
    explicit Unitary2(const Mat2& m, double tol = kDefaultTolerance);

    [[nodiscard]] static Unitary2 identity();
    [[nodiscard]] const Mat2& matrix() const noexcept { return m_; }
    [[nodiscard]] Unitary2 adjoint() const;
    /// Largest entry of |U U^dagger - I|.
    [[nodiscard]] static double unitarity_defect(const Mat2& m);

    friend Unitary2 operator*(const Unitary2& a, const Unitary2& b);

private:
    struct Unchecked {};
    Unitary2(const Mat2& m, Unchecked) : m_(m) {}
    Mat2 m_;
};

/// Hermitian, unit-trace, positive-semidefinite 2x2 matrix.
///
/// Eigenvalues in [-1e-12, 0) are tolerated as integrator round-off and
/// clipped to zero by the entropy functions; anything more negative is
/// rejected at construction.
class DensityMatrix {
public:
    static constexpr double kTolerance = 1e-12;

    explicit DensityMatrix(const Mat2& m);

    [[nodiscard]] static DensityMatrix maximally_mixed();
    /// (I + r.sigma)/2; throws ValidationError if |r| > 1 + 1e-12.
    [[nodiscard]] static DensityMatrix from_bloch(const BlochVector& r);

    [[nodiscard]] const Mat2& matrix() const noexcept { return m_; }
    /// Eigenvalues clipped into [0, 1], ascending.
    [[nodiscard]] Eigensystem2 eigensystem() const;
    /// rho -> U rho U^dagger
    [[nodiscard]] DensityMatrix conjugated(const Unitary2& u) const;

private:
    Mat2 m_;
};

/// Strong type for beta*h in (kHz)^-1.
class InverseTemperature {
public:
    /// Throws DomainError unless finite and >= 0.
    explicit InverseTemperature(double beta_h);
    /// beta*h = 1/(k_B T/h).
    [[nodiscard]] static InverseTemperature from_thermal_energy_khz(double kT_over_h_khz);

    [[nodiscard]] double value() const noexcept { return beta_h_; }

private:
    double beta_h_;
};

[[nodiscard]] HermitianOperator2 pauli(Axis axis);

/// e^{-beta H} / tr e^{-beta H}, evaluated in the eigenbasis of H with the
/// exponent shifted by the ground energy.
[[nodiscard]] DensityMatrix gibbs_state(const HermitianOperator2& h, InverseTemperature beta);

/// -tr(rho ln rho) in nats.
[[nodiscard]] double vn_entropy(const DensityMatrix& rho);

/// tr[rho (ln rho - ln sigma)] in nats. Throws SupportError when sigma is
/// rank-deficient on a direction where rho has weight.
[[nodiscard]] double kl_divergence(const DensityMatrix& rho, const DensityMatrix& sigma);

[[nodiscard]] BlochVector bloch_vector(const DensityMatrix& rho);

/// Half the trace norm of rho - sigma.
[[nodiscard]] double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// max |a_ij - b_ij|
[[nodiscard]] double max_abs_diff(const Mat2& a, const Mat2& b);

/// Closed-form exp(-i theta n.sigma) = cos(theta) I - i sin(theta) n.sigma for
/// a traceless Hermitian generator written as theta_vec . sigma.
[[nodiscard]] Unitary2 su2_exponential(const std::array<double, 3>& theta_vec);

}  // namespace qarrow
