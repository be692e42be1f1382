#include "sparsecirc/ensembles.hpp"

#include <cmath>
#include <numbers>

#include "sparsecirc/errors.hpp"

namespace sparsecirc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Two independent standard normals from two uniforms (Box-Muller).
std::pair<double, double> box_muller(double u1, double u2) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

std::string_view atom_name(Atom atom) {
  switch (atom) {
    case Atom::BernoulliPM1: return "bernoulli";
    case Atom::RealGaussian: return "gaussian";
    case Atom::ComplexGaussian: return "complex-gaussian";
    case Atom::ComplexBernoulli: return "complex-bernoulli";
  }
  return "?";
}

std::optional<Atom> parse_atom(std::string_view name) {
  for (Atom a : {Atom::BernoulliPM1, Atom::RealGaussian, Atom::ComplexGaussian,
                 Atom::ComplexBernoulli})
    if (atom_name(a) == name) return a;
  return std::nullopt;
}

bool is_complex(Atom atom) {
  return atom == Atom::ComplexGaussian || atom == Atom::ComplexBernoulli;
}

Complex sample_atom(Atom atom, const RandomStream& stream, std::uint64_t k0) {
  const double u1 = stream.uniform(k0);
  switch (atom) {
    case Atom::BernoulliPM1:
      return u1 < 0.5 ? -1.0 : 1.0;
    case Atom::RealGaussian:
      return box_muller(u1, stream.uniform(k0 + 1)).first;
    case Atom::ComplexGaussian: {
      const auto [a, b] = box_muller(u1, stream.uniform(k0 + 1));
      return {a * kInvSqrt2, b * kInvSqrt2};
    }
    case Atom::ComplexBernoulli: {
      const double u2 = stream.uniform(k0 + 1);
      return {u1 < 0.5 ? -kInvSqrt2 : kInvSqrt2, u2 < 0.5 ? -kInvSqrt2 : kInvSqrt2};
    }
  }
  return 0.0;
}

std::optional<double> modulus_density(Atom atom, double r) {
  if (r < 0.0) return 0.0;
  switch (atom) {
    case Atom::RealGaussian:
      // |x| is half-normal.
      return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * r * r);
    case Atom::ComplexGaussian:
      // |x|^2 ~ Exp(1), so |x| is Rayleigh with scale 1/sqrt(2).
      return 2.0 * r * std::exp(-r * r);
    default:
      return std::nullopt;
  }
}

double SparseParams::rho() const noexcept {
  if (alpha_ == 1.0) return 1.0;
  return std::pow(static_cast<double>(n_), alpha_ - 1.0);
}

SparseParams make_sparse_params(double alpha, long long n) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("sparsity parameter alpha must lie in (0, 1], got " + std::to_string(alpha));
  if (n < 1) throw DomainError("dimension n must be at least 1, got " + std::to_string(n));
  return {alpha, static_cast<std::size_t>(n)};
}

std::string_view scaling_name(SparseScaling s) {
  return s == SparseScaling::Ensemble ? "ensemble" : "mean";
}

std::optional<SparseScaling> parse_scaling(std::string_view name) {
  if (name == "ensemble") return SparseScaling::Ensemble;
  if (name == "mean") return SparseScaling::Mean;
  return std::nullopt;
}

Complex sample_entry(Atom atom, const SparseParams& params, const RandomStream& stream,
                     SparseScaling scaling) {
  const double rho = params.rho();
  // Uniform 0 decides I_rho; uniforms 1 and 2 feed the atom.
  if (rho < 1.0 && stream.uniform(0) >= rho) return 0.0;
  const Complex x = sample_atom(atom, stream, 1);
  if (rho == 1.0) return x;
  return scaling == SparseScaling::Ensemble ? x / std::sqrt(rho) : x / rho;
}

Complex sample_entry(Atom atom, const SparseParams& params, const SeedPath& seed,
                     SparseScaling scaling) {
  return sample_entry(atom, params, seed.stream(), scaling);
}

std::string_view shift_name(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::Zero: return "zero";
    case ShiftKind::UnivDiag: return "univ-diag";
    case ShiftKind::OutlierDiag: return "outlier-diag";
    case ShiftKind::CustomDiag: return "custom-diag";
  }
  return "?";
}

std::optional<ShiftKind> parse_shift(std::string_view name) {
  for (ShiftKind k :
       {ShiftKind::Zero, ShiftKind::UnivDiag, ShiftKind::OutlierDiag, ShiftKind::CustomDiag})
    if (shift_name(k) == name) return k;
  return std::nullopt;
}

std::vector<Complex> shift_diagonal(const ShiftPattern& shift, std::size_t n) {
  std::vector<Complex> diag(n, 0.0);
  const double sn = std::sqrt(static_cast<double>(n));
  switch (shift.kind) {
    case ShiftKind::Zero:
      break;
    case ShiftKind::UnivDiag: {
      const std::size_t a = n / 4, b = n / 6, c = n / 12;
      std::size_t i = 0;
      for (; i < a; ++i) diag[i] = sn * Complex(-1.0, -1.0);
      for (; i < a + b; ++i) diag[i] = sn * Complex(1.2, -0.8);
      for (; i < a + b + c; ++i) diag[i] = sn * Complex(1.5, 0.3);
      break;
    }
    case ShiftKind::OutlierDiag: {
      const auto k = static_cast<std::size_t>(std::floor(sn));
      for (std::size_t i = 0; i < k && i < n; ++i) diag[i] = 2.0 * sn;
      break;
    }
    case ShiftKind::CustomDiag:
      if (shift.values.size() > n)
        throw ShapeError("custom shift has " + std::to_string(shift.values.size()) +
                         " values, more than n = " + std::to_string(n));
      for (std::size_t i = 0; i < shift.values.size(); ++i) diag[i] = sn * shift.values[i];
      break;
  }
  return diag;
}

double shift_bound(const ShiftPattern& shift, std::size_t n) {
  double s = 0.0;
  for (const auto& v : shift_diagonal(shift, n)) s += std::norm(v);
  const double nn = static_cast<double>(n);
  return s / (nn * nn);
}

ComplexMatrix sample_matrix(const EnsembleSpec& spec, const SeedPath& seed,
                            std::size_t max_dimension) {
  const std::size_t n = spec.params.n();
  if (n > max_dimension)
    throw ResourceError("matrix dimension " + std::to_string(n) + " exceeds limit " +
                        std::to_string(max_dimension));
  const SparseParams params = spec.sparse ? spec.params : make_sparse_params(1.0, 1);
  ComplexMatrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      a(i, j) = sample_entry(spec.atom, params, seed.stream(i, j));
  const auto diag = shift_diagonal(spec.shift, n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += diag[i];
  return a;
}

std::vector<Triplet> sample_triplets(const EnsembleSpec& spec, const SeedPath& seed) {
  const std::size_t n = spec.params.n();
  const SparseParams params = spec.sparse ? spec.params : make_sparse_params(1.0, 1);
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex v = sample_entry(spec.atom, params, seed.stream(i, j));
      if (v != Complex{}) out.push_back({i, j, v});
    }
  return out;
}

}  // namespace sparsecirc
