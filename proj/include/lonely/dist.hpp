#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

#include "lonely/rational.hpp"

namespace lonely {

// A finite distribution with exact rational masses. Zero-mass outcomes are
// never stored, so the support is exactly the set of keys.
template <typename Outcome>
class ExactDist {
 public:
  using Map = std::map<Outcome, Rational>;

  ExactDist() = default;

  static ExactDist point(Outcome o) {
    ExactDist d;
    d.add(std::move(o), 1);
    return d;
  }

  void add(const Outcome& o, const Rational& mass) {
    if (mass < 0) throw std::invalid_argument("ExactDist: negative mass");
    if (mass == 0) return;
    mass_[o] += mass;
  }

  const Map& masses() const { return mass_; }
  std::size_t size() const { return mass_.size(); }
  bool empty() const { return mass_.empty(); }

  Rational mass(const Outcome& o) const {
    auto it = mass_.find(o);
    return it == mass_.end() ? Rational(0) : it->second;
  }

  Rational total() const {
    Rational t = 0;
    for (const auto& [o, p] : mass_) t += p;
    return t;
  }

  bool is_normalized() const { return total() == 1; }

  void require_normalized(const std::string& what) const {
    if (!is_normalized()) throw std::invalid_argument(what + ": masses do not sum to 1");
  }

  // Pushforward along f.
  template <typename F>
  auto map(F&& f) const {
    using Out = std::decay_t<decltype(f(std::declval<const Outcome&>()))>;
    ExactDist<Out> out;
    for (const auto& [o, p] : mass_) out.add(f(o), p);
    return out;
  }

  bool operator==(const ExactDist&) const = default;

 private:
  Map mass_;
};

// P(X >= u) for an integer-valued distribution.
inline Rational tail_ge(const ExactDist<int>& d, long long u) {
  Rational t = 0;
  for (const auto& [o, p] : d.masses())
    if (o >= u) t += p;
  return t;
}

}  // namespace lonely
