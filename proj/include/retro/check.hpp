#pragma once

#include <string>
#include <vector>

namespace retro {

/// A single numeric verification: measured value against a tolerance.
struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    /// Passes when value <= tolerance. NaN never passes.
    static Check at_most(std::string name, double value, double tolerance);
    /// Passes when value >= threshold.
    static Check at_least(std::string name, double value, double threshold);
};

class CheckList {
public:
    void add(Check c) { checks_.push_back(std::move(c)); }
    Check& add_at_most(std::string name, double value, double tolerance);
    void append(const CheckList& other);

    bool all_passed() const noexcept;
    const std::vector<Check>& checks() const noexcept { return checks_; }
    bool empty() const noexcept { return checks_.empty(); }

private:
    std::vector<Check> checks_;
};

}  // namespace retro
