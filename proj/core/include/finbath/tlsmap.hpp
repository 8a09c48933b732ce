#pragma once

// Generic qubit machinery: the constrained 4x4 superoperator of a CPTP map,
// extraction of the time-local generator Phi' Phi^{-1}, its Choi matrix and
// pseudo-Kraus decomposition, the canonical (minimal-dissipation) form of the
// master equation, and fixed-step propagation of that master equation.
//
// Superoperators act on row-major vectorized operators, see matkit::vec.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "finbath/matkit.hpp"

namespace finbath::tlsmap {

/// Independent elements of a qubit dynamical map. The nine remaining entries
/// of the 4x4 matrix follow from trace and Hermiticity preservation.
struct TlsMapParams {
  double phi11 = 1.0;
  double phi44 = 1.0;
  Complex phi12{};
  Complex phi21{};
  Complex phi22{1.0, 0.0};
  Complex phi23{};
  Complex phi24{};
};

class TlsMap {
 public:
  /// Identity channel.
  TlsMap();

  const TlsMapParams& params() const noexcept { return params_; }
  const Mat4& matrix() const noexcept { return matrix_; }

  /// devec(Phi vec(x)) for an arbitrary 2x2 operator.
  Mat2 operator()(const Mat2& x) const;

 private:
  friend TlsMap build_map(const TlsMapParams& params);
  TlsMap(const TlsMapParams& params, const Mat4& matrix) : params_(params), matrix_(matrix) {}

  TlsMapParams params_;
  Mat4 matrix_;
};

/// Assembles the full superoperator; throws InvalidArgument on non-finite input.
TlsMap build_map(const TlsMapParams& params);

/// Time derivative of the superoperator given the derivatives of the
/// independent elements; the affine constants of build_map drop out.
Mat4 map_matrix_derivative(const TlsMapParams& derivatives);

/// Applies the map to a density matrix (validated within `tol`).
Mat2 apply_map(const TlsMap& map, const Mat2& rho, double tol = kDefaultTol);

/// max |e^{-i sz phi} Phi[rho] e^{i sz phi} - Phi[e^{-i sz phi} rho e^{i sz phi}]|.
double phase_covariance_residual(const TlsMap& map, double phi, const Mat2& rho);

// ---------------------------------------------------------------------------
// Generator extraction

/// Deterministic time-indexed family of superoperators Phi(t). `derivative`
/// is optional; when empty the generator falls back to finite differences.
struct MapSource {
  std::function<Mat4(double)> map;
  std::function<Mat4(double)> derivative;
};

/// Builds a MapSource from a TlsMap-valued family.
MapSource make_map_source(std::function<TlsMap(double)> map,
                          std::function<Mat4(double)> derivative = {});

struct AnalyticDerivative {};

/// Fourth-order central differences (forward stencil near t = 0). A
/// non-positive step selects the default 1e-5 * max(1, |t|).
struct FiniteDifference {
  double step = 0.0;
};

using DerivativeMode = std::variant<AnalyticDerivative, FiniteDifference>;

/// Maps with |det Phi| at or below this value are treated as singular.
inline constexpr double kSingularDeterminant = 1e-12;

/// Phi'(t) evaluated according to `mode`.
Mat4 map_derivative(const MapSource& source, double t, const DerivativeMode& mode);

/// Raw Phi'(t) Phi(t)^{-1} without structural validation. Throws SingularMap
/// or NonFiniteDerivative.
Mat4 generator_matrix(const MapSource& source, double t,
                      const DerivativeMode& mode = AnalyticDerivative{});

struct StructureReport {
  double max_violation = 0.0;
  std::string worst_relation;
};

/// Checks l11, l14 real; l13 = l12*; l31 = l21*; l32 = l23*; l33 = l22*;
/// l34 = l24*; l4k = -l1k for k = 1..4.
StructureReport validate_generator_structure(const Mat4& l);

/// Hermiticity-preserving, trace-annihilating qubit generator.
class TlsGenerator {
 public:
  /// Zero generator.
  TlsGenerator() : matrix_(Mat4::Zero()) {}

  /// Validates the structural relations with tolerance tol * max(1, max|l|).
  static TlsGenerator from_matrix(const Mat4& l, double tol = kDefaultTol);

  const Mat4& matrix() const noexcept { return matrix_; }
  Mat2 operator()(const Mat2& rho) const;

 private:
  explicit TlsGenerator(const Mat4& l) : matrix_(l) {}
  Mat4 matrix_;
};

TlsGenerator generator_from_map(const MapSource& source, double t,
                                const DerivativeMode& mode = AnalyticDerivative{},
                                double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Choi matrix and canonical form

/// C = (L (x) I)|psi><psi|, |psi> = sum_i |ii>; block form [[A, B], [B^+, -A]].
Mat4 choi_of_generator(const TlsGenerator& generator);

struct PseudoKraus {
  double rate = 0.0;
  Mat2 op = Mat2::Zero();  // unit Frobenius norm
};

struct ChoiSpectrum {
  std::vector<PseudoKraus> terms;

  /// sum_k gamma_k E_k rho E_k^+
  Mat2 operator()(const Mat2& rho) const;
};

/// Eigen-decomposes the Choi matrix; pairs sorted by descending rate.
/// Negative rates are kept. Hermiticity is checked within tol * max(1, max|C|).
ChoiSpectrum pseudo_kraus(const Mat4& choi, double tol = kDefaultTol);

struct Jump {
  double rate = 0.0;
  Mat2 op = Mat2::Zero();
};

struct GeneratorDecomposition {
  Mat2 hamiltonian = Mat2::Zero();
  std::vector<Jump> jumps;

  /// -i[H, rho] + sum_k gamma_k (L rho L^+ - {L^+ L, rho}/2)
  Mat2 operator()(const Mat2& rho) const;
  /// Dissipative part alone.
  Mat2 dissipator(const Mat2& rho) const;
  /// The generator as a 4x4 superoperator.
  Mat4 superoperator() const;
};

/// Canonical Hamiltonian and traceless jump operators (d = 2).
GeneratorDecomposition canonical_form(const ChoiSpectrum& spectrum);

/// The full pipeline: generator, Choi matrix, pseudo-Kraus, canonical form.
GeneratorDecomposition canonical_master_equation(const MapSource& source, double t,
                                                 const DerivativeMode& mode = AnalyticDerivative{},
                                                 double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Propagation and steady states

using DecompositionSource = std::function<GeneratorDecomposition(double)>;

struct PropagationOptions {
  int substeps = 10;
  /// Optional real-valued function that changes sign exactly where the
  /// generator ceases to exist (e.g. det Phi_t). A sign change between two
  /// consecutive substeps raises SingularMap at the bracketed time.
  std::function<double(double)> singularity_indicator;
};

/// Classic RK4 on the master equation, `substeps` steps per grid interval.
/// t_grid must start at 0 and increase strictly. Returns one state per grid
/// point.
std::vector<Mat2> propagate_master_equation(const DecompositionSource& source,
                                            const Mat2& rho0,
                                            const std::vector<double>& t_grid,
                                            const PropagationOptions& options = {});

struct Trajectory {
  /// States for the leading grid points reached before any singularity.
  std::vector<Mat2> states;
  std::optional<double> singular_at;
};

/// As propagate_master_equation, but a singularity bracketed by the indicator
/// ends the trajectory instead of throwing.
Trajectory propagate_until_singular(const DecompositionSource& source, const Mat2& rho0,
                                    const std::vector<double>& t_grid,
                                    const PropagationOptions& options = {});

struct SteadyState {
  /// Basis of the null space of the generator, canonical gauge.
  std::vector<Mat2> basis;
  /// Hermitian unit-trace element of the null space, when one exists.
  std::optional<Mat2> representative;
};

SteadyState steady_state(const TlsGenerator& generator, double tol = 1e-10);

}  // namespace finbath::tlsmap
