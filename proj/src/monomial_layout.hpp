#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "holodyn/multi_index.hpp"

namespace holodyn::detail {

// Graded enumeration of the monomials 1 <= |alpha| <= N in d variables plus
// the lookup tables the series kernels need.
class MonomialLayout {
 public:
  MonomialLayout(std::size_t dim, int trunc);

  std::size_t dim() const noexcept { return dim_; }
  int trunc() const noexcept { return trunc_; }
  std::size_t size() const noexcept { return monomials_.size(); }

  const MultiIndex& monomial(std::size_t rank) const { return monomials_[rank]; }
  int degree(std::size_t rank) const { return degree_[rank]; }
  // Ranks of degree m occupy [degree_begin(m), degree_begin(m+1)).
  std::size_t degree_begin(int m) const { return offsets_[static_cast<std::size_t>(m)]; }

  // -1 when alpha is outside the layout (wrong order or dimension).
  std::ptrdiff_t rank_of(const MultiIndex& alpha) const;
  std::ptrdiff_t rank_of_key(std::uint64_t key) const;
  std::uint64_t key(std::size_t rank) const { return keys_[rank]; }
  std::uint64_t unit_key(std::size_t i) const { return unit_keys_[i]; }

  // For degree >= 2: alpha = monomial(pred_rank) + e_{pred_var}. For degree 1
  // pred_rank is -1.
  std::size_t pred_var(std::size_t rank) const { return pred_var_[rank]; }
  std::ptrdiff_t pred_rank(std::size_t rank) const { return pred_rank_[rank]; }

  // For rank a: all (b, rank(a+b)) with |a|+|b| <= N. Built on first use.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& products(std::size_t rank) const;

 private:
  void build_products() const;

  std::size_t dim_;
  int trunc_;
  std::vector<MultiIndex> monomials_;
  std::vector<int> degree_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> unit_keys_;
  std::unordered_map<std::uint64_t, std::uint32_t> by_key_;
  std::vector<std::size_t> pred_var_;
  std::vector<std::ptrdiff_t> pred_rank_;

  mutable std::once_flag products_once_;
  mutable std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> products_;
};

std::shared_ptr<const MonomialLayout> layout_for(std::size_t dim, int trunc);

}  // namespace holodyn::detail
