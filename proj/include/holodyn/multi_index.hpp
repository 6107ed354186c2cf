#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace holodyn {

// Exponent vector alpha in N^d. Ordering is graded: lower order first, and
// within one order the vector with more weight on early coordinates first,
// so (2,0) < (1,1) < (0,2).
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  MultiIndex(std::initializer_list<int> entries);

  static MultiIndex zero(std::size_t dim);
  static MultiIndex unit(std::size_t dim, std::size_t j);

  std::size_t dim() const noexcept { return entries_.size(); }
  int order() const noexcept { return order_; }
  int operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  // Componentwise <=.
  bool divides(const MultiIndex& other) const;
  bool is_zero() const noexcept { return order_ == 0; }
  // Indices i with entries[i] > 0.
  std::vector<std::size_t> support() const;

  MultiIndex operator+(const MultiIndex& other) const;
  // Throws DomainError when a coordinate would go negative.
  MultiIndex operator-(const MultiIndex& other) const;
  MultiIndex scaled(int factor) const;

  bool operator==(const MultiIndex& other) const = default;
  std::strong_ordering operator<=>(const MultiIndex& other) const;

  std::string to_string() const;

 private:
  std::vector<int> entries_;
  int order_ = 0;
};

// All multi-indices of dimension d with lo <= |alpha| <= hi, in graded order.
std::vector<MultiIndex> enumerate_multi_indices(std::size_t dim, int lo, int hi);

}  // namespace holodyn
