#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace sparsecirc {

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-addressed stream of random words derived from one digest.
struct RandomStream {
  std::uint64_t digest;

  /// k-th 64-bit word of the stream.
  std::uint64_t bits(std::uint64_t k) const noexcept {
    return mix64(digest + (k + 1) * 0x9E3779B97F4A7C15ULL);
  }
  /// k-th uniform in the open interval (0, 1).
  double uniform(std::uint64_t k) const noexcept {
    return (static_cast<double>(bits(k) >> 11) + 0.5) * 0x1.0p-53;
  }
};

/// Hierarchical, stateless seed: (master, label_1, ..., label_k).
///
/// Every random quantity in the project is a pure function of a SeedPath
/// and a small draw counter, so values never depend on the order in which
/// they are generated or on which thread generates them.
class SeedPath {
 public:
  explicit SeedPath(std::uint64_t master) : master_(master), digest_(mix64(master ^ kDomain)) {}
  SeedPath(std::uint64_t master, std::initializer_list<std::uint64_t> labels) : SeedPath(master) {
    for (auto l : labels) push(l);
  }

  /// Extended copy (this path followed by `label`).
  SeedPath child(std::uint64_t label) const {
    SeedPath p = *this;
    p.push(label);
    return p;
  }
  SeedPath child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }

  std::uint64_t master() const noexcept { return master_; }
  const std::vector<std::uint64_t>& labels() const noexcept { return labels_; }
  std::uint64_t digest() const noexcept { return digest_; }

  RandomStream stream() const noexcept { return {digest_}; }
  /// Stream of child(a).child(b) without materializing the child path.
  RandomStream stream(std::uint64_t a, std::uint64_t b) const noexcept {
    const auto depth = labels_.size();
    return {extend(extend(digest_, depth + 1, a), depth + 2, b)};
  }
  double uniform(std::uint64_t k) const noexcept { return stream().uniform(k); }

  friend bool operator==(const SeedPath& a, const SeedPath& b) {
    return a.master_ == b.master_ && a.labels_ == b.labels_;
  }

 private:
  static constexpr std::uint64_t kDomain = 0x5350415253454349ULL;

  // The depth enters the hash so (a, b) and (b, a) never collide trivially.
  static constexpr std::uint64_t extend(std::uint64_t digest, std::size_t depth,
                                        std::uint64_t label) noexcept {
    return mix64(digest ^ mix64(label + 0x9E3779B97F4A7C15ULL * depth));
  }

  void push(std::uint64_t label) {
    labels_.push_back(label);
    digest_ = extend(digest_, labels_.size(), label);
  }

  std::uint64_t master_;
  std::uint64_t digest_;
  std::vector<std::uint64_t> labels_;
};

}  // namespace sparsecirc
