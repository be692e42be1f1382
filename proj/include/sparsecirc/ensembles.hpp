#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsecirc/matrix.hpp"
#include "sparsecirc/seed.hpp"

namespace sparsecirc {

/// Base random variable x. Every kind has mean zero and E|x|^2 = 1; the
/// complex kinds draw real and imaginary parts independently with
/// variance 1/2 each.
enum class Atom { BernoulliPM1, RealGaussian, ComplexGaussian, ComplexBernoulli };

std::string_view atom_name(Atom atom);
/// Inverse of atom_name; std::nullopt for unknown names.
std::optional<Atom> parse_atom(std::string_view name);
bool is_complex(Atom atom);

/// One draw of the atom from uniforms k0 and k0 + 1 of `stream`.
Complex sample_atom(Atom atom, const RandomStream& stream, std::uint64_t k0 = 1);

/// Density of |x| at r, for atoms whose modulus has a density.
/// Returns std::nullopt for the Bernoulli kinds (|x| = 1 almost surely).
std::optional<double> modulus_density(Atom atom, double r);

/// Sparsity parameters. rho is always derived from (alpha, n).
class SparseParams {
 public:
  double alpha() const noexcept { return alpha_; }
  std::size_t n() const noexcept { return n_; }
  double rho() const noexcept;

 private:
  friend SparseParams make_sparse_params(double alpha, long long n);
  SparseParams(double alpha, std::size_t n) : alpha_(alpha), n_(n) {}
  double alpha_;
  std::size_t n_;
};

/// Validates 0 < alpha <= 1 and n >= 1; throws DomainError otherwise.
SparseParams make_sparse_params(double alpha, long long n);

/// How a kept draw is rescaled. Ensemble: x / sqrt(rho), the matrix entry
/// law (unit variance). Mean: x / rho, the normalization under which the
/// sparse variable has the same mean as x.
enum class SparseScaling { Ensemble, Mean };

std::string_view scaling_name(SparseScaling s);
std::optional<SparseScaling> parse_scaling(std::string_view name);

/// I_rho * x * scale with I_rho ~ Bernoulli(rho), deterministic in `seed`.
Complex sample_entry(Atom atom, const SparseParams& params, const SeedPath& seed,
                     SparseScaling scaling = SparseScaling::Ensemble);
Complex sample_entry(Atom atom, const SparseParams& params, const RandomStream& stream,
                     SparseScaling scaling = SparseScaling::Ensemble);

enum class ShiftKind { Zero, UnivDiag, OutlierDiag, CustomDiag };

/// Deterministic diagonal shift M_n.
struct ShiftPattern {
  ShiftKind kind = ShiftKind::Zero;
  /// CustomDiag only: diagonal of M_n / sqrt(n), zero-padded to length n.
  std::vector<Complex> values;

  static ShiftPattern zero() { return {}; }
  static ShiftPattern univ_diag() { return {ShiftKind::UnivDiag, {}}; }
  static ShiftPattern outlier_diag() { return {ShiftKind::OutlierDiag, {}}; }
  static ShiftPattern custom(std::vector<Complex> diag_over_sqrt_n) {
    return {ShiftKind::CustomDiag, std::move(diag_over_sqrt_n)};
  }

  friend bool operator==(const ShiftPattern&, const ShiftPattern&) = default;
};

std::string_view shift_name(ShiftKind kind);
std::optional<ShiftKind> parse_shift(std::string_view name);

/// Diagonal of M_n at dimension n.
std::vector<Complex> shift_diagonal(const ShiftPattern& shift, std::size_t n);
/// (1/n^2) * ||M_n||_HS^2.
double shift_bound(const ShiftPattern& shift, std::size_t n);

struct EnsembleSpec {
  Atom atom = Atom::BernoulliPM1;
  SparseParams params = make_sparse_params(1.0, 1);
  ShiftPattern shift;
  /// false: entries are plain iid copies of the atom (no I_rho thinning).
  bool sparse = true;
};

inline constexpr std::size_t kDefaultMaxDimension = 8192;

/// A_n = M_n + X_n with entry (i, j) drawn from seed.child(i, j).
/// Throws ResourceError when n exceeds max_dimension.
ComplexMatrix sample_matrix(const EnsembleSpec& spec, const SeedPath& seed,
                            std::size_t max_dimension = kDefaultMaxDimension);

struct Triplet {
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// Nonzero entries of the random part X_n (diagnostics only).
std::vector<Triplet> sample_triplets(const EnsembleSpec& spec, const SeedPath& seed);

}  // namespace sparsecirc
