#pragma once

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "inert/error.hpp"

namespace inert {

/// Uniform probability measure on finitely many atoms, kept sorted.
class EmpiricalMeasure {
public:
    EmpiricalMeasure() = default;

    explicit EmpiricalMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
        if (atoms_.empty()) throw invalid_input("EmpiricalMeasure: need at least one atom");
        std::sort(atoms_.begin(), atoms_.end());
    }

    std::size_t size() const noexcept { return atoms_.size(); }
    std::span<const double> atoms() const noexcept { return atoms_; }
    double operator[](std::size_t i) const noexcept { return atoms_[i]; }

    EmpiricalMeasure shifted(double s) const {
        std::vector<double> a(atoms_);
        for (double& v : a) v += s;
        return EmpiricalMeasure(std::move(a));
    }

private:
    std::vector<double> atoms_;
};

}  // namespace inert
