#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace agsynth {

// An ordered set of named, fixed-width variables. Valuations over a domain
// are bit-packed; the first variable occupies the most significant bits, so
// enumeration order is lexicographic in declaration order.
class Domain {
public:
  struct Slot {
    std::string name;
    int width;
    int offset;  // bit offset from the least significant end
  };

  Domain() = default;
  explicit Domain(const std::vector<std::pair<std::string, int>>& vars);

  int total_bits() const { return total_bits_; }
  size_t size() const { return slots_.size(); }
  const std::vector<Slot>& slots() const { return slots_; }
  bool contains(const std::string& name) const;
  const Slot& slot(const std::string& name) const;

  bool operator==(const Domain& o) const;

private:
  std::vector<Slot> slots_;
  int total_bits_ = 0;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_domain(const std::vector<std::pair<std::string, int>>& vars);

// Total function from the domain's (variable, bit) positions to booleans.
class Valuation {
public:
  Valuation() : dom_(make_domain({})) {}
  explicit Valuation(DomainPtr dom, uint64_t bits = 0);

  const DomainPtr& domain() const { return dom_; }
  uint64_t bits() const { return bits_; }

  uint64_t get(const std::string& name) const;
  bool get_bit(const std::string& name, int bit) const;
  void set(const std::string& name, uint64_t value);

  bool operator==(const Valuation& o) const;

  std::string to_string() const;

private:
  DomainPtr dom_;
  uint64_t bits_;
};

// Restriction of v to the sub-domain s (every name of s must be in v).
Valuation restrict_to(const Valuation& v, const DomainPtr& s);

// Concatenation; u and w must agree on shared variables, result domain is
// u's variables followed by w's new ones.
Valuation concat(const Valuation& u, const Valuation& w);

inline constexpr int kDefaultGroundingBudget = 24;

// All 2^bits valuations of s in lexicographic order (first variable most
// significant). Throws budget_error beyond the bit budget.
std::vector<Valuation> enumerate_valuations(const DomainPtr& s,
                                            int bit_budget = kDefaultGroundingBudget);

}  // namespace agsynth
