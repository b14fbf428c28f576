#include "retro/check.hpp"

#include <algorithm>

namespace retro {

Check Check::at_most(std::string name, double value, double tolerance) {
    return {std::move(name), value, tolerance, value <= tolerance};
}

Check Check::at_least(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, value >= threshold};
}

Check& CheckList::add_at_most(std::string name, double value, double tolerance) {
    checks_.push_back(Check::at_most(std::move(name), value, tolerance));
    return checks_.back();
}

void CheckList::append(const CheckList& other) {
    checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
}

bool CheckList::all_passed() const noexcept {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
}

}  // namespace retro
