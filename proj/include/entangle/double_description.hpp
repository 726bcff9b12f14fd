#pragma once

// Exact double description method for the extreme rays of a pointed cone
// { y : A y >= 0 } with integer A.

#include "entangle/exact.hpp"

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace entangle {

namespace detail {

/// Fixed-size bitset sized at run time.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  Bits operator&(const Bits& o) const {
    Bits r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
  }

  bool subset_of(const Bits& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

struct DoubleDescriptionOptions {
  /// Abort with SizeLimit when the intermediate ray count exceeds this.
  std::size_t max_rays = 200000;
};

/// Extreme rays of { y in R^n : A y >= 0 }, gcd-normalized. A must have rank n.
inline std::vector<exact::IntVector> extreme_rays(const std::vector<exact::IntVector>& a, std::size_t n,
                                                  const DoubleDescriptionOptions& opts = {}) {
  using exact::IntVector;
  using exact::Wide;
  const std::size_t m = a.size();

  // Pick n independent rows; they bound a simplicial starting cone.
  exact::Echelon ech(n);
  std::vector<std::size_t> basis;
  std::vector<bool> in_basis(m, false);
  for (std::size_t i = 0; i < m && basis.size() < n; ++i) {
    if (ech.insert(a[i])) {
      basis.push_back(i);
      in_basis[i] = true;
    }
  }
  if (basis.size() < n) {
    throw Error(ErrorCode::InvalidInput,
                "cone is not pointed: constraint rank " + std::to_string(basis.size()) + " < " +
                    std::to_string(n));
  }

  struct Ray {
    IntVector v;
    detail::Bits tight;
  };
  std::vector<Ray> rays;
  for (std::size_t i = 0; i < n; ++i) {
    exact::Echelon others(n);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.insert(a[basis[j]]);
    IntVector r = others.kernel().at(0);
    if (exact::dot(a[basis[i]], r) < 0)
      for (auto& x : r) x = -x;
    Ray ray{std::move(r), detail::Bits(m)};
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) ray.tight.set(basis[j]);
    rays.push_back(std::move(ray));
  }

  for (std::size_t k = 0; k < m; ++k) {
    if (in_basis[k]) continue;
    std::vector<Wide> s(rays.size());
    std::vector<std::size_t> pos, neg;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      s[r] = exact::dot(a[k], rays[r].v);
      if (s[r] > 0) pos.push_back(r);
      else if (s[r] < 0) neg.push_back(r);
      else rays[r].tight.set(k);
    }
    if (neg.empty()) continue;

    std::vector<Ray> fresh;
    for (std::size_t p : pos) {
      for (std::size_t q : neg) {
        detail::Bits common = rays[p].tight & rays[q].tight;
        if (common.count() + 2 < n) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r != p && r != q && common.subset_of(rays[r].tight)) adjacent = false;
        }
        if (!adjacent) continue;
        Ray nr{exact::combine(s[p], rays[q].v, -s[q], rays[p].v), common};
        nr.tight.set(k);
        fresh.push_back(std::move(nr));
      }
    }

    std::vector<Ray> next;
    next.reserve(rays.size() - neg.size() + fresh.size());
    for (std::size_t r = 0; r < rays.size(); ++r)
      if (s[r] >= 0) next.push_back(std::move(rays[r]));
    for (auto& r : fresh) next.push_back(std::move(r));
    rays = std::move(next);
    if (rays.size() > opts.max_rays) {
      throw Error(ErrorCode::SizeLimit,
                  "double description exceeded " + std::to_string(opts.max_rays) + " intermediate rays");
    }
  }

  std::vector<IntVector> out;
  out.reserve(rays.size());
  for (auto& r : rays) out.push_back(std::move(r.v));
  return out;
}

}  // namespace entangle
