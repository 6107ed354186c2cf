#include "holodyn/multi_index.hpp"

#include <algorithm>
#include <numeric>

#include "holodyn/error.hpp"

namespace holodyn {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) fail(ErrorKind::InvalidArgument, "multi-index entries must be non-negative");
    order_ += e;
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::vector<int>(entries)) {}

MultiIndex MultiIndex::zero(std::size_t dim) { return MultiIndex(std::vector<int>(dim, 0)); }

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t j) {
  std::vector<int> e(dim, 0);
  e.at(j) = 1;
  return MultiIndex(std::move(e));
}

bool MultiIndex::divides(const MultiIndex& other) const {
  if (dim() != other.dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i)
    if (entries_[i] > other.entries_[i]) return false;
  return true;
}

std::vector<std::size_t> MultiIndex::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < dim(); ++i)
    if (entries_[i] > 0) s.push_back(i);
  return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dim() != other.dim()) fail(ErrorKind::DimensionMismatch, "multi-index dimensions differ");
  std::vector<int> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.entries_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (dim() != other.dim()) fail(ErrorKind::DimensionMismatch, "multi-index dimensions differ");
  std::vector<int> e(entries_);
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] -= other.entries_[i];
    if (e[i] < 0) fail(ErrorKind::InvalidArgument, "multi-index difference is negative");
  }
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::scaled(int factor) const {
  std::vector<int> e(entries_);
  for (int& x : e) x *= factor;
  return MultiIndex(std::move(e));
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  if (auto c = order_ <=> other.order_; c != 0) return c;
  // Reverse lexicographic on entries: more weight early sorts first.
  for (std::size_t i = 0; i < std::min(dim(), other.dim()); ++i) {
    if (entries_[i] != other.entries_[i])
      return entries_[i] > other.entries_[i] ? std::strong_ordering::less
                                             : std::strong_ordering::greater;
  }
  return dim() <=> other.dim();
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(entries_[i]);
  }
  return s + ")";
}

namespace {

void fill_degree(std::size_t dim, int degree, std::size_t pos, std::vector<int>& cur,
                 std::vector<MultiIndex>& out) {
  if (pos + 1 == dim) {
    cur[pos] = degree;
    out.emplace_back(cur);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[pos] = e;
    fill_degree(dim, degree - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_multi_indices(std::size_t dim, int lo, int hi) {
  std::vector<MultiIndex> out;
  if (dim == 0) return out;
  std::vector<int> cur(dim, 0);
  for (int m = std::max(lo, 0); m <= hi; ++m) fill_degree(dim, m, 0, cur, out);
  return out;
}

}  // namespace holodyn
