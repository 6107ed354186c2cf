#include "monomial_layout.hpp"

#include <limits>
#include <map>

#include "holodyn/error.hpp"

namespace holodyn::detail {

MonomialLayout::MonomialLayout(std::size_t dim, int trunc) : dim_(dim), trunc_(trunc) {
  if (dim == 0) fail(ErrorKind::DimensionMismatch, "dimension must be at least 1");
  if (trunc < 1) fail(ErrorKind::OrderOutOfRange, "truncation must be at least 1");

  const std::uint64_t base = static_cast<std::uint64_t>(trunc) + 1;
  std::uint64_t weight = 1;
  unit_keys_.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    unit_keys_[i] = weight;
    if (i + 1 < dim) {
      if (weight > std::numeric_limits<std::uint64_t>::max() / base)
        fail(ErrorKind::InvalidArgument, "dimension and truncation too large for the monomial index");
      weight *= base;
    }
  }

  monomials_ = enumerate_multi_indices(dim, 1, trunc);
  offsets_.assign(static_cast<std::size_t>(trunc) + 2, 0);
  degree_.reserve(monomials_.size());
  keys_.reserve(monomials_.size());
  for (std::size_t r = 0; r < monomials_.size(); ++r) {
    const auto& m = monomials_[r];
    degree_.push_back(m.order());
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < dim; ++i) k += unit_keys_[i] * static_cast<std::uint64_t>(m[i]);
    keys_.push_back(k);
    by_key_.emplace(k, static_cast<std::uint32_t>(r));
  }
  offsets_[1] = 0;
  for (int m = 1; m <= trunc; ++m) {
    std::size_t r = offsets_[static_cast<std::size_t>(m)];
    while (r < monomials_.size() && degree_[r] == m) ++r;
    offsets_[static_cast<std::size_t>(m) + 1] = r;
  }

  pred_var_.assign(monomials_.size(), 0);
  pred_rank_.assign(monomials_.size(), -1);
  for (std::size_t r = 0; r < monomials_.size(); ++r) {
    const auto& m = monomials_[r];
    std::size_t v = 0;
    while (m[v] == 0) ++v;
    pred_var_[r] = v;
    if (m.order() >= 2) pred_rank_[r] = rank_of_key(keys_[r] - unit_keys_[v]);
  }
}

std::ptrdiff_t MonomialLayout::rank_of_key(std::uint64_t key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::ptrdiff_t MonomialLayout::rank_of(const MultiIndex& alpha) const {
  if (alpha.dim() != dim_ || alpha.order() < 1 || alpha.order() > trunc_) return -1;
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < dim_; ++i) k += unit_keys_[i] * static_cast<std::uint64_t>(alpha[i]);
  return rank_of_key(k);
}

void MonomialLayout::build_products() const {
  products_.resize(monomials_.size());
  for (std::size_t a = 0; a < monomials_.size(); ++a) {
    const int room = trunc_ - degree_[a];
    if (room < 1) continue;
    const std::size_t end = offsets_[static_cast<std::size_t>(room) + 1];
    auto& row = products_[a];
    row.reserve(end);
    for (std::size_t b = 0; b < end; ++b) {
      auto c = rank_of_key(keys_[a] + keys_[b]);
      row.emplace_back(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(c));
    }
  }
}

const std::vector<std::pair<std::uint32_t, std::uint32_t>>& MonomialLayout::products(
    std::size_t rank) const {
  std::call_once(products_once_, [this] { build_products(); });
  return products_[rank];
}

std::shared_ptr<const MonomialLayout> layout_for(std::size_t dim, int trunc) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const MonomialLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{dim, trunc}];
  if (!slot) slot = std::make_shared<const MonomialLayout>(dim, trunc);
  return slot;
}

}  // namespace holodyn::detail
