#include "agsynth/valuation.hpp"

#include <algorithm>
#include <sstream>

#include "agsynth/errors.hpp"

namespace agsynth {

Domain::Domain(const std::vector<std::pair<std::string, int>>& vars) {
  int total = 0;
  for (const auto& [name, width] : vars) {
    if (width < 1) throw semantic_error("variable '" + name + "' has width < 1");
    total += width;
  }
  if (total > 64)
    throw budget_error("domain exceeds 64 bits (" + std::to_string(total) + ")");
  total_bits_ = total;
  int off = total;
  for (const auto& [name, width] : vars) {
    for (const auto& s : slots_)
      if (s.name == name) throw semantic_error("duplicate variable '" + name + "'");
    off -= width;
    slots_.push_back({name, width, off});
  }
}

bool Domain::contains(const std::string& name) const {
  for (const auto& s : slots_)
    if (s.name == name) return true;
  return false;
}

const Domain::Slot& Domain::slot(const std::string& name) const {
  for (const auto& s : slots_)
    if (s.name == name) return s;
  throw semantic_error("undeclared variable '" + name + "'");
}

bool Domain::operator==(const Domain& o) const {
  if (slots_.size() != o.slots_.size()) return false;
  for (size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i].name != o.slots_[i].name || slots_[i].width != o.slots_[i].width)
      return false;
  return true;
}

DomainPtr make_domain(const std::vector<std::pair<std::string, int>>& vars) {
  return std::make_shared<const Domain>(vars);
}

Valuation::Valuation(DomainPtr dom, uint64_t bits) : dom_(std::move(dom)), bits_(bits) {
  if (dom_->total_bits() < 64) bits_ &= (uint64_t(1) << dom_->total_bits()) - 1;
}

uint64_t Valuation::get(const std::string& name) const {
  const auto& s = dom_->slot(name);
  uint64_t mask = s.width >= 64 ? ~uint64_t(0) : (uint64_t(1) << s.width) - 1;
  return (bits_ >> s.offset) & mask;
}

bool Valuation::get_bit(const std::string& name, int bit) const {
  const auto& s = dom_->slot(name);
  if (bit < 0 || bit >= s.width)
    throw semantic_error("bit index out of range for '" + name + "'");
  return (bits_ >> (s.offset + bit)) & 1;
}

void Valuation::set(const std::string& name, uint64_t value) {
  const auto& s = dom_->slot(name);
  uint64_t mask = s.width >= 64 ? ~uint64_t(0) : (uint64_t(1) << s.width) - 1;
  bits_ = (bits_ & ~(mask << s.offset)) | ((value & mask) << s.offset);
}

bool Valuation::operator==(const Valuation& o) const {
  return *dom_ == *o.dom_ && bits_ == o.bits_;
}

std::string Valuation::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& s : dom_->slots()) {
    if (!first) out << " ";
    first = false;
    out << s.name << "=" << get(s.name);
  }
  return out.str();
}

Valuation restrict_to(const Valuation& v, const DomainPtr& s) {
  Valuation out(s);
  for (const auto& slot : s->slots()) {
    if (!v.domain()->contains(slot.name))
      throw semantic_error("restriction to undeclared variable '" + slot.name + "'");
    if (v.domain()->slot(slot.name).width != slot.width)
      throw semantic_error("width mismatch for '" + slot.name + "' in restriction");
    out.set(slot.name, v.get(slot.name));
  }
  return out;
}

Valuation concat(const Valuation& u, const Valuation& w) {
  std::vector<std::pair<std::string, int>> vars;
  for (const auto& s : u.domain()->slots()) vars.emplace_back(s.name, s.width);
  for (const auto& s : w.domain()->slots()) {
    if (u.domain()->contains(s.name)) {
      if (u.get(s.name) != w.get(s.name))
        throw semantic_error("concatenation conflict on variable '" + s.name + "'");
      continue;
    }
    vars.emplace_back(s.name, s.width);
  }
  Valuation out(make_domain(vars));
  for (const auto& s : u.domain()->slots()) out.set(s.name, u.get(s.name));
  for (const auto& s : w.domain()->slots()) out.set(s.name, w.get(s.name));
  return out;
}

std::vector<Valuation> enumerate_valuations(const DomainPtr& s, int bit_budget) {
  if (s->total_bits() > bit_budget)
    throw budget_error("grounding over " + std::to_string(s->total_bits()) +
                       " bits exceeds budget of " + std::to_string(bit_budget));
  uint64_t count = uint64_t(1) << s->total_bits();
  std::vector<Valuation> out;
  out.reserve(count);
  for (uint64_t b = 0; b < count; ++b) out.emplace_back(s, b);
  return out;
}

}  // namespace agsynth
