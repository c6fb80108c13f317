#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bam/error.hpp"

namespace bam {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact probability mass function over the integers.
///
/// Only strictly positive masses are stored, so the support is exactly the
/// key set. Nothing forces the total to be one while a pmf is being built;
/// call `is_normalized()` when that matters.
class Pmf {
 public:
  using Map = std::map<std::int64_t, Rational>;

  Pmf() = default;
  Pmf(std::initializer_list<std::pair<const std::int64_t, Rational>> init) {
    for (const auto& [k, p] : init) add(k, p);
  }

  void add(std::int64_t k, const Rational& p) {
    if (p == 0) return;
    auto [it, fresh] = mass_.try_emplace(k, p);
    if (!fresh) {
      it->second += p;
      if (it->second == 0) mass_.erase(it);
    }
  }

  Rational operator()(std::int64_t k) const {
    auto it = mass_.find(k);
    return it == mass_.end() ? Rational(0) : it->second;
  }

  std::vector<std::int64_t> support() const {
    std::vector<std::int64_t> s;
    s.reserve(mass_.size());
    for (const auto& kv : mass_) s.push_back(kv.first);
    return s;
  }

  std::size_t size() const { return mass_.size(); }
  bool empty() const { return mass_.empty(); }
  std::int64_t min() const { return mass_.begin()->first; }
  std::int64_t max() const { return mass_.rbegin()->first; }

  Rational total() const {
    Rational t = 0;
    for (const auto& kv : mass_) t += kv.second;
    return t;
  }

  bool is_normalized() const { return total() == 1; }

  Rational mean() const {
    Rational m = 0;
    for (const auto& [k, p] : mass_) m += p * k;
    return m;
  }

  std::map<std::int64_t, double> to_double() const {
    std::map<std::int64_t, double> out;
    for (const auto& [k, p] : mass_) out.emplace(k, static_cast<double>(p));
    return out;
  }

  // Law of a + b*X.
  Pmf affine(std::int64_t a, std::int64_t b) const {
    Pmf out;
    for (const auto& [k, p] : mass_) out.add(a + b * k, p);
    return out;
  }

  Map::const_iterator begin() const { return mass_.begin(); }
  Map::const_iterator end() const { return mass_.end(); }

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  Map mass_;
};

inline std::string to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace bam
